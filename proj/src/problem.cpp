#include "thetafv/problem.hpp"

namespace thetafv {

Field Problem::spatial_operator(const Field& q, const Grid& grid, double time) const {
  const Eigen::Index n = grid.size();
  const Field flux = face_fluxes(q, grid, time);
  Field h = sources(q, grid, time);
  for (Eigen::Index j = 0; j < n; ++j) {
    h.row(j) -= (flux.row(j + 1) - flux.row(j)) / grid.volumes()(j);
  }
  return h;
}

}  // namespace thetafv
