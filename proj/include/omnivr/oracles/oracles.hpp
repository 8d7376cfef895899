#pragma once

// Independent reference computations. Nothing here calls into the code it is
// used to check: rays are built from explicit camera basis vectors, derivatives
// come from finite differences, and resampling from dense 2D loops.

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "omnivr/geometry.hpp"
#include "omnivr/image.hpp"
#include "omnivr/nn/autograd.hpp"

namespace omnivr::oracle {

// World-frame unit ray through viewport coordinate (u, v), from the camera's
// forward/right/up vectors.
std::array<double, 3> ray(const ViewportSpec& spec, double u, double v);
// (theta, phi) of that ray.
std::array<double, 2> sphere(const ViewportSpec& spec, double u, double v);
// ERP pixel coordinate (x1, x2) of that ray.
std::array<double, 2> erp(const ViewportSpec& spec, double u, double v, int erp_height, int erp_width);

// Finite-difference derivatives of the viewport -> sphere map with respect to
// normalized viewport coordinates (u / w_v, v / h_v), in the descriptor layout:
// jac = [cos(t) dphi/du, dtheta/du, cos(t) dphi/dv, dtheta/dv];
// hess = [d/du (cos(t) dphi/du), d/dv (cos(t) dphi/du), d/dv (cos(t) dphi/dv),
//         theta_uu, theta_uv, theta_vv].
struct ShapeReference {
  std::array<double, 4> jac{};
  std::array<double, 6> hess{};
};
ShapeReference shape_reference(const ViewportSpec& spec, double u, double v, double step = 1e-5);

// max |a - b| / max |b| over the entries.
double normwise_relative_error(const double* a, const double* b, int n);

// Non-separable 2D antialiased bicubic reduction; rows clamp at the edges,
// columns clamp or wrap.
Image dense_downscale(const Image& img, int scale, bool wrap_x = false);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // "<param>[<index>]"
};

// Runs loss_fn once with backward for the analytic gradient, then compares each
// entry of each input against a central difference of the forward value.
// Relative error is |a - f| / max(|a|, |f|, floor) with floor =
// floor_fraction * max|f| over that input plus 1e-12. loss_fn must be
// deterministic; inputs are perturbed in place and restored.
// max_entries_per_input = 0 checks every entry; otherwise an evenly strided subset.
GradCheckResult gradcheck(const std::function<nn::Var()>& loss_fn,
                          const std::vector<std::pair<std::string, nn::Var>>& inputs, double eps = 1e-5,
                          double floor_fraction = 1e-6, std::size_t max_entries_per_input = 0);

struct NamedGradCheck {
  std::string name;
  GradCheckResult result;
};
// One check per differentiable primitive on small random inputs.
std::vector<NamedGradCheck> primitive_gradchecks(std::uint64_t seed = 7);

struct EndToEndGradCheck {
  GradCheckResult result;
  double downsampler_grad_norm = 0.0;  // |dL/d down.*| summed over those params
};
// Full training loss on a 32x64 synthetic panorama, p = 16, s = 2, tiny model,
// noise-mode quantization so the graph is differentiable in the ordinary sense.
EndToEndGradCheck end_to_end_gradcheck(std::uint64_t seed = 11, std::size_t max_entries_per_input = 24);

// The four suites behind `omnivr oracle --check`. Each prints one line per
// sub-check and returns true when all pass.
bool check_roundtrip(std::ostream& out);
bool check_ssr_fd(std::ostream& out);
bool check_downscale(std::ostream& out);
bool check_gradcheck(std::ostream& out);

}  // namespace omnivr::oracle
