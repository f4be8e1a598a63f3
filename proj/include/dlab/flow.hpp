#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dlab/descent.hpp"
#include "dlab/objectives.hpp"

namespace dlab {

struct FlowRecord {
  double t = 0.0;
  Point y;
  double value = 0.0;
  double grad_norm = 0.0;
  double dissipation = 0.0;  // integral of |grad F|^2 up to t
  double winding = 0.0;      // unwrapped polar angle change since t = 0 (2D)
};

// Record of a continuous gradient-descent run (accepted steps only).
struct FlowTrace {
  std::vector<FlowRecord> records;
  std::string objective_name;
  Point y0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double min_step = 0.0;
  double max_step = 0.0;
  double min_radius = 0.0;  // over all accepted states (2D only)

  std::size_t size() const { return records.size(); }
  std::size_t dim() const { return y0.size(); }
  const FlowRecord& back() const { return records.back(); }
};

struct FlowOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  // Reject steps whose polar-angle change exceeds this (2D, away from the
  // origin), so unwrapping per step is unambiguous.
  double max_angle_step = 0.7853981633974483;  // pi/4
  std::size_t max_steps = 20'000'000;
};

// Solves dy/dt = -grad F(y), y(0) = x0 up to time T with a Dormand-Prince
// 5(4) embedded pair and PI step-size control. The dissipation integral is
// advanced with the same stage evaluations (augmented quadrature state).
FlowTrace integrate(const Objective& obj, const Point& x0, double T, const FlowOptions& opts);
FlowTrace integrate(const Objective& obj, const Point& x0, double T, double rel_tol,
                    double abs_tol);

// Total unwrapped change of atan2(y2, y1) over the trace. Throws
// OriginCrossingError for non-planar traces or trajectories that come within
// 0.1 of the origin.
double winding_angle(const FlowTrace& trace);

// The region U between the spirals r = 1 + 1/(2 pi + theta) (inner) and
// r = 1 + 1/(pi + theta) (outer), theta = unwrapped polar angle >= 0.
struct AnnulusRegion {
  static double inner(double theta) { return 1.0 + 1.0 / (2.0 * 3.14159265358979323846 + theta); }
  static double outer(double theta) { return 1.0 + 1.0 / (3.14159265358979323846 + theta); }
  static bool contains(double r, double theta_unwrapped);
};

// Residency of a trajectory in the annulus: winding accumulated while inside
// and the time of first exit, if any.
struct AnnulusResidency {
  bool ever_inside = false;
  double winding_inside = 0.0;
  std::optional<double> first_exit_time;
};

AnnulusResidency annulus_residency(const FlowTrace& trace);

enum class PdmClass { kInner, kOuter };

const char* to_string(PdmClass c);

// Which side of the separatrix a settled Palis-de Melo trajectory committed
// to. The unwrapped phase psi = 1/(|y|-1) - theta is in (pi, 2 pi) while the
// trajectory is still between the spirals; crossing the inner zero branch
// pins psi above 2 pi forever (the objective strictly decreases, so the
// F > 0 band cannot be re-entered), crossing the outer branch pins it below
// pi. Throws NotSettledError while psi is still in the undecided band or the
// final gradient norm is above settle_tol.
PdmClass classify_pdm_trajectory(const FlowTrace& trace, double settle_tol);

struct SeparatrixResult {
  double r_star = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  PdmClass lo_class = PdmClass::kInner;
  PdmClass hi_class = PdmClass::kOuter;
  int iterations = 0;
};

struct SeparatrixOptions {
  double settle_tol = 0.9;
  FlowOptions flow;
};

// Bisection on the initial abscissa (r, 0) of the Palis-de Melo flow: each
// step classifies one trajectory over horizon T. Throws SameClassError when
// the endpoints classify identically.
SeparatrixResult bisect_separatrix(const Objective& pdm, double lo, double hi, double T,
                                   int iters, const SeparatrixOptions& opts = {});

// Discrete-vs-continuous contrast at the separatrix: gradient descent with a
// summable schedule from (r_star, 0) against the continuous trajectory.
struct ContrastReport {
  Outcome discrete_outcome;
  double discrete_final_grad = 0.0;
  double discrete_total_winding = 0.0;
  double discrete_tail_winding = 0.0;  // |winding gain| over the last tenth
  double continuous_winding = 0.0;
  AnnulusResidency continuous_annulus;
  double continuous_T = 0.0;
  Trace discrete_trace;
  FlowTrace continuous_trace;
};

struct ContrastOptions {
  double continuous_T = 200.0;
  FlowOptions flow;
  OutcomeTolerances outcome;
};

ContrastReport contrast_discrete(const Objective& pdm, double r_star, const Schedule& s,
                                 long budget, const ContrastOptions& opts = {});

// Unwrapped winding of a discrete planar iterate sequence (assumes per-step
// angle changes below pi). Throws OriginCrossingError within 0.1 of the
// origin.
double discrete_winding(const std::vector<Point>& xs);

}  // namespace dlab
