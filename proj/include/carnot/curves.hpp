#pragma once

#include "carnot/metric.hpp"

#include <functional>
#include <string>
#include <vector>

namespace carnot {

using CurveFn = std::function<RVec(double)>;

// Piecewise control t -> first-layer velocity. Pieces are contiguous and
// each is evaluated only on its own closed interval, so jumps at the
// breakpoints are resolved by the integrator.
class HorizontalControl
{
public:
	struct Piece
	{
		double a, b;
		CurveFn f; // full-length algebra vector, zero outside layer 1
	};

	HorizontalControl(AlgebraPtr g, std::vector<Piece> pieces, int smoothness = 0, std::string name = "control");
	HorizontalControl(AlgebraPtr g, double a, double b, CurveFn f, int smoothness = 0, std::string name = "control");

	const GradedAlgebra& algebra() const { return *g_; }
	AlgebraPtr algebra_ptr() const { return g_; }
	double a() const { return pieces_.front().a; }
	double b() const { return pieces_.back().b; }
	int smoothness() const { return smooth_; }
	const std::string& name() const { return name_; }
	const std::vector<Piece>& pieces() const { return pieces_; }
	std::vector<double> breakpoints() const; // interior only

	// Value at t, taken from the piece whose midpoint side t is on when
	// t is a breakpoint: `side` < 0 picks the left piece.
	RVec operator()(double t, int side = 1) const;
	// Restriction to [s, t].
	HorizontalControl restrict(double s, double t) const;

private:
	AlgebraPtr g_;
	std::vector<Piece> pieces_;
	int smooth_;
	std::string name_;
};

// Built-ins on the first two first-layer basis vectors (e1, e2):
//   line      u = e1 on [0, 1]
//   circle    u = (-sin t, cos t) on [0, 2 pi], radius 1, start at the origin
//   square    unit square loop e1, e2, -e1, -e2 on [0, 4]
//   parabola  u = (1, 2t) on [0, 1]
HorizontalControl builtin_control(AlgebraPtr g, const std::string& name);
std::vector<std::string> builtin_control_names();

struct SampledCurve
{
	AlgebraPtr g;
	std::vector<double> t;
	std::vector<RVec> x;          // exponential coordinates gamma(t_k)
	std::vector<double> breaks;   // samples at these times are skipped by derivative checks
	int refinements = 0;          // Richardson doublings used by horizontal_lift
	double richardson_error = 0;  // last max difference between the two grids
};

// Right-hand side of the contact system: full velocity of gamma given the
// first-layer part u, filled layer by layer.
RVec contact_velocity(const GradedAlgebra& g, const RVec& gamma, const RVec& u);

// Left-trivialised derivative sum_n (-1)^n/(n+1)! [gamma, v]_n; horizontal
// curves have this in the first layer.
RVec left_trivialized(const GradedAlgebra& g, const RVec& gamma, const RVec& v);

// Fixed-step RK4 on a uniform grid of `steps` intervals, doubling the inner
// substeps until the grid values agree within tol.
SampledCurve horizontal_lift(const HorizontalControl& u, const RVec& start, int steps, double tol = 1e-8,
                             int max_refinements = 12);

struct HorizontalityReport
{
	bool horizontal;
	double max_residual;
	double at_time;
};

// Central differences (five-point on uniform stretches) away from breaks; residual is the
// Euclidean norm of the non-first-layer part of the left-trivialised derivative.
HorizontalityReport is_horizontal(const SampledCurve& c, double tol);

// delta_{1/h}( exp(-h u(t)) o Gamma(t)^-1 o Gamma(t+h) ), with the middle
// factor obtained by lifting the control over [t, t+h] from the identity.
RVec pansu_quotient(const HorizontalControl& u, double t, double h, double tol = 1e-13);

// Least-squares slope of log y against log x.
double fit_order(const std::vector<double>& x, const std::vector<double>& y);

struct OrderStudy
{
	std::vector<double> h, value;
	double order;
};

// Euclidean norm of pansu_quotient at each h.
OrderStudy pansu_order(const HorizontalControl& u, double t, const std::vector<double>& hs);

// sup over 0 < tau <= |lambda| of the mean of |u| over [t, t + tau]
// (or [t - tau, t] for negative lambda), trapezoid rule on n cells.
double sup_average(const HorizontalControl& u, double t, double lambda, int n = 2000);

// sum_k gamma(t_k)^-1 o gamma(t_{k+1}) as a vector sum.
RVec group_riemann_sum(const GradedAlgebra& g, const CurveFn& gamma, const std::vector<double>& partition);
RVec group_riemann_sum(const SampledCurve& c, const std::vector<std::size_t>& indices);
// gamma(s) - gamma(0) + sum_{n>=2} (-1)^{n-1}/n! int_0^s [gamma, gamma']_{n-1}, Simpson on n cells.
RVec riemann_limit(const GradedAlgebra& g, const CurveFn& gamma, const CurveFn& dgamma, double s, int n = 4096);

// Partition sums on dyadic refinements of the sampled grid (method A) and
// quadrature of the gauge of the control (method B).
struct VariationReport
{
	double partition_sup, quadrature, relative_gap;
	int dyadic_levels;
};
double variation_partition(const SampledCurve& c, const HomogeneousMetric& m, int* levels = nullptr);
double variation_quadrature(const HorizontalControl& u, const HomogeneousMetric& m, int n = 1 << 14);
VariationReport variation(const SampledCurve& c, const HorizontalControl& u, const HomogeneousMetric& m);

struct LipschitzReport
{
	double lip_first_layer; // max |gamma_1(t_{k+1}) - gamma_1(t_k)| / dt
	double lip_group;       // max d(Gamma(t_k), Gamma(t_{k+1})) / dt
	double ratio;           // lip_group / lip_first_layer
	double contact_residual;
	bool horizontal;
	bool consistent; // horizontal and C^-1 <= ratio <= C
};

LipschitzReport verify_ac_lip_characterization(const SampledCurve& c, const HomogeneousMetric& m, double c_bound = 10,
                                               double tol = 1e-6);

} // namespace carnot
