#pragma once

#include "carnot/metric.hpp"
#include "carnot/subgroups.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

// Map between graded groups in exponential coordinates.
struct PDMap
{
	AlgebraPtr domain, codomain;
	std::function<RVec(const RVec&)> f;
	// Coordinate box [lo_i, hi_i]; empty means unbounded.
	std::vector<std::pair<double, double>> box;
	// Optional first-layer differential: codomain.dim x dim V1(domain), columns
	// are images of the first-layer basis vectors.
	std::function<Eigen::MatrixXd(const RVec&)> d1;
	// Optional exact evaluator (polynomial maps).
	std::function<QVec(const QVec&)> exact_f;
	std::string name = "map";

	RVec operator()(const RVec& x) const;
	bool in_domain(const RVec& x) const;
};

// Left-trivialised derivative of t -> f(x exp(tX)) at 0 (five-point central
// difference). Its first layer is d_H f(x)(X); the other layers vanish for
// contact maps. Throws std::out_of_range if the stencil leaves the box.
RVec horizontal_derivative(const PDMap& m, const RVec& x, const RVec& X, double h = 1e-3);

// Unique Lie homomorphism extending a first-layer map on a stratified domain
// (columns as in PDMap::d1). Returns the full codomain.dim x domain.dim
// matrix; throws if the domain is not generated by its first layer.
Eigen::MatrixXd extend_to_homomorphism(const GradedAlgebra& dom, const GradedAlgebra& cod, const Eigen::MatrixXd& d1);

// Euclidean differential of F along the first-layer directions: columns
// dF(x)(X_i), higher components from the contact recursion with F(x).
Eigen::MatrixXd lift_differential(const GradedAlgebra& cod, const Eigen::MatrixXd& d1, const RVec& fx);

// Nearest rational with denominator <= max_den.
Rational rationalize(double v, long max_den = 1000000);
QMatrix rationalize(const Eigen::MatrixXd& a, long max_den = 1000000);

struct PansuReport
{
	Eigen::MatrixXd matrix;      // full differential
	Eigen::MatrixXd first_layer; // estimate used
	bool analytic = false;
	bool homomorphism = false;   // bracket compatibility of the extension
	std::vector<double> scales, defect; // sup rho(f(x)^-1 f(x d_s h), d_s L h) / s over unit h
	bool converged = false;             // defect decreasing, last <= max(defect_tol, first / 2)
};

struct PansuOptions
{
	std::vector<double> fd_steps{1e-2, 5e-3, 2.5e-3}; // Richardson on central differences
	std::vector<double> scales{1e-1, 1e-2, 1e-3, 1e-4};
	std::size_t directions = 64;
	std::uint64_t seed = 1;
	double defect_tol = 1e-3;
};

PansuReport pansu_differential(const PDMap& m, const RVec& x, const PansuOptions& opt = {});

// Differential as an exact graded morphism, rationalised from the analytic
// first layer when available.
GradedMorphism pansu_morphism(const PDMap& m, const RVec& x, const PansuOptions& opt = {});

struct ContactReport
{
	double max_residual = 0;
	RVec worst_point;
	int worst_direction = -1;
	bool contact = false;
};

ContactReport contact_check(const PDMap& m, const std::vector<RVec>& points, double h = 1e-3, double tol = 1e-6);

struct MeanValueBin
{
	double lo, hi;
	std::size_t count;
	double sup;
};

struct MeanValueReport
{
	std::vector<MeanValueBin> bins;
	bool decays = false;   // sups decreasing within 10% noise
	double last_over_first = 0;
};

// Pairs x, y = x delta_r(u) around `center` with u on the unit gauge sphere
// and r in bins (r0 4^-k / 2, r0 4^-k], k = 0..nbins-1.
MeanValueReport mean_value_ratio(const PDMap& m, const HomogeneousMetric& dom_metric,
                                 const HomogeneousMetric& cod_metric, const RVec& center, double spread, double r0,
                                 int nbins, std::size_t pairs_per_bin, std::uint64_t seed = 1);

struct NewtonOptions
{
	double tol = 1e-12;
	int max_iter = 100;
	double fd_scale = 1e-6;
};

struct NewtonResult
{
	RVec x;
	double residual;
	int iterations;
	bool converged;
};

// Damped Newton with Armijo backtracking on r(x) = 0, forward-difference Jacobian.
NewtonResult newton_solve(const std::function<RVec(const RVec&)>& r, RVec x0, const NewtonOptions& opt = {});

struct InverseResult
{
	RVec x;
	double residual; // rho(f(x), y)
	int iterations;
	double beta;     // empirical min rho(f a, f b) / d(a, b) near the solution
};

// Solves f(x) = y near x_bar on coordinates.
InverseResult local_inverse(const PDMap& m, const RVec& x_bar, const RVec& y, const HomogeneousMetric& dom_metric,
                            const HomogeneousMetric& cod_metric, double tol = 1e-12, std::uint64_t seed = 1);

struct ImplicitSolution
{
	RVec x_bar;
	HomogeneousSubalgebra kernel, complement;
	std::vector<RVec> n_basis, h_basis; // float bases, grid coordinates refer to these
	std::vector<RVec> nodes;   // n in exp(N), exponential coordinates
	std::vector<RVec> phi;     // phi(n) in exp(H)
	std::vector<double> residual;
	double max_residual = 0;
	double max_restart_gap = 0; // uniqueness check
	double kappa = 0;           // empirical constant of the intrinsic Hoelder estimate
	double holder_const = 0;    // sup d(phi n, phi n') / d(n, n')^{1/step}
	double radius = 0;          // achieved grid half-width
};

struct ImplicitOptions
{
	std::vector<int> nodes;   // per kernel basis vector; default 21 per first-layer vector, 3 above
	double radius = 0.5;      // layer-l coordinates span [-r^l, r^l]
	int restarts = 5;
	double restart_spread = 0.3;
	double tol = 1e-12;
	std::uint64_t seed = 1;
	bool holder = true;
};

// Level set of f through x_bar as the intrinsic graph x_bar n phi(n) over the
// kernel of Df(x_bar). Shrinks the box until every node converges.
ImplicitSolution implicit_function(const PDMap& m, const RVec& x_bar, const HomogeneousMetric& dom_metric,
                                   const ImplicitOptions& opt = {});

// Solves f(x_bar n h) = f(x_bar) for h near h0 (complement coordinates).
NewtonResult implicit_node(const PDMap& m, const ImplicitSolution& s, const RVec& n, const RVec& h0, double tol = 1e-12);

struct RankParametrization
{
	HomogeneousSubalgebra image, normal;
	QMatrix projection;
	std::vector<RVec> h;   // sampled points of exp(H)
	std::vector<RVec> psi; // local inverse of p o f at h
	std::vector<RVec> phi; // h^-1 f(psi(h)), in exp(N)
	double max_residual = 0;   // |f(psi h) - h phi(h)| and distance of phi(h) from N
	double lipschitz = 0;      // sup |phi(h) - phi(h')| / d(h, h')
};

RankParametrization rank_parametrization(const PDMap& m, const RVec& x_bar, const HomogeneousMetric& cod_metric,
                                         double radius = 0.2, int per_axis = 7, std::uint64_t seed = 1);

struct BlowupReport
{
	std::vector<double> scales, distance;
	std::vector<std::size_t> points;
	double R = 1;
	bool decreasing = false; // within 10% noise
};

// Localised Hausdorff distance (Euclidean in coordinates): cloud points in
// D_R against the cone sample, and cone points in D_R against the cloud.
double local_hausdorff(const std::vector<RVec>& a, const std::vector<RVec>& b, const HomogeneousMetric& m, double R);

// sampler(lambda) returns pairs (cone point c, point of S near x_bar that
// corresponds to delta_lambda c); the cone sample is the set of c.
using BlowupSampler = std::function<std::vector<std::pair<RVec, RVec>>(double)>;
BlowupReport tangent_cone_samples(const BlowupSampler& sampler, const RVec& x_bar, const HomogeneousMetric& m,
                                  const std::vector<double>& scales, double R = 1);

// Cone sampler for level sets solved by implicit_node: cone points are a
// seeded sample of exp(N) in D_{1.25 R}.
BlowupSampler implicit_blowup_sampler(const PDMap& m, const ImplicitSolution& s, const HomogeneousMetric& metric,
                                      double R, std::size_t count, std::uint64_t seed = 1);

struct TangentDimReport
{
	int q_kernel, q_domain, q_codomain;
	bool ok;
};
TangentDimReport tangent_dim_check(const ImplicitSolution& s, const GradedAlgebra& codomain);

// Rank of span{[a, b]} over the subalgebra basis (0: commutative).
int bracket_rank(const HomogeneousSubalgebra& a);

// Registered example maps.
// H^2 -> R^2, x -> (sqrt(x2^2 + x3^2), x4) in the basis X1, X2, X3, X4, X5 of
// the Heisenberg presentation [X1,X2] = [X3,X4] = X5.
PDMap example_level_map();
// Linear h-homomorphism with exact evaluator.
PDMap linear_map(AlgebraPtr domain, AlgebraPtr codomain, const QMatrix& l);
// Dilation delta_r of a group, with exact evaluator when r is rational.
PDMap dilation_map(AlgebraPtr g, const Rational& r);
// Left translation by p.
PDMap translation_map(AlgebraPtr g, const RVec& p);
// H^1 -> H^1, (x, y, z) -> (x, y + x^2, z + x^3/6); contact.
PDMap shear_map();
// H^1 -> H^1, (x, y, z) -> (x, y, z + x^2); not contact.
PDMap bend_map();
// R^2 -> H^2, t -> (t1, e t1^2, t2, 0, e t1^3/6); contact embedding.
PDMap parabola_sheet_map(double e);
// g -> R, x -> x_index (a first-layer coordinate).
PDMap coordinate_function(AlgebraPtr g, int index);

} // namespace carnot
