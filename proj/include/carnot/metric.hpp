#pragma once

#include "carnot/graded_algebra.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace carnot {

enum class MetricKind { weighted_max, koranyi };

// Homogeneous gauge N on the group, read in exponential coordinates.
//   koranyi:      ((|pi_1 x|^2)^2 + 16 |pi_2 x|^2)^{1/4}, step <= 2
//   weighted_max: max_l w_l |pi_l x|^{1/l}
class HomogeneousMetric
{
public:
	HomogeneousMetric(AlgebraPtr g, MetricKind kind, std::vector<double> weights = {});

	const GradedAlgebra& algebra() const { return *g_; }
	AlgebraPtr algebra_ptr() const { return g_; }
	MetricKind kind() const { return kind_; }
	const std::vector<double>& weights() const { return w_; }

	double norm(const RVec& x) const;
	// d(x, y) = N((-x) o y)
	double distance(const RVec& x, const RVec& y) const;

	// Dilates x onto the unit gauge sphere; x must be nonzero.
	RVec normalize(const RVec& x) const;

private:
	void check(const RVec& x) const;
	AlgebraPtr g_;
	MetricKind kind_;
	std::vector<double> w_;
};

MetricKind parse_metric_kind(const std::string& s);
std::string to_string(MetricKind k);

// Koranyi when the step allows it, weighted_max otherwise.
HomogeneousMetric default_metric(AlgebraPtr g);

// |pi_1(x - y)| / d(x, y); throws if x == y.
double first_layer_lower_bound(const RVec& x, const RVec& y, const HomogeneousMetric& m);

struct EmpiricalConstant
{
	std::string label;
	double nu = 0;
	std::size_t samples = 0;
	double sup = 0;
	std::vector<double> argmax; // optimizer parameters at the sup
};

struct SampleOptions
{
	std::size_t samples = 2000;
	std::uint64_t seed = 1;
	int threads = 1;
	int refine_top = 8; // local searches started from the best samples
};

// Sup of f over the box [-1,1]^m: random samples, then compass search from
// the best ones. f returns NaN where the parameters are inadmissible.
EmpiricalConstant maximize_sampled(const std::string& label, std::size_t m,
                                   const std::function<double(const std::vector<double>&)>& f,
                                   const SampleOptions& opt);

// Parameter maps used by the estimators; both consume dim+1 parameters.
// Euclidean ball of radius nu in coordinates.
RVec euclidean_ball_point(const std::vector<double>& p, std::size_t offset, std::size_t dim, double nu);
// Gauge ball {N <= nu}.
RVec gauge_ball_point(const HomogeneousMetric& m, const std::vector<double>& p, std::size_t offset, double nu);

// Generating word P^s(a) = delta_{a_1} h_{i_1} ... delta_{a_s} h_{i_s} with
// h_i = exp(X_i / d(exp X_i)).
class WordSystem
{
public:
	// Closed-form system for abelian and step-2 stratified groups:
	// commutator blocks (i,j,i,j) for spanning pairs, then each letter once.
	static WordSystem closed_form(const HomogeneousMetric& m);
	// User-registered index sequence; solve_word is unavailable.
	WordSystem(const HomogeneousMetric& m, std::vector<int> indices);

	const GradedAlgebra& algebra() const { return *g_; }
	std::size_t length() const { return idx_.size(); }
	const std::vector<int>& indices() const { return idx_; }   // positions in the first layer, 0-based
	const std::vector<double>& rescaling() const { return n_; } // d(exp X_i)
	bool has_solver() const { return solver_; }

	RVec generating_word(const std::vector<double>& a, std::size_t s) const;
	RVec generating_word(const std::vector<double>& a) const { return generating_word(a, a.size()); }
	std::vector<double> solve_word(const RVec& x) const;

private:
	WordSystem() = default;
	AlgebraPtr g_;
	std::vector<int> first_;   // algebra indices of first-layer basis vectors
	std::vector<int> idx_;
	std::vector<double> n_;
	bool solver_ = false;
	std::vector<std::pair<int, int>> pairs_; // spanning pairs, positions in first_
	std::vector<int> second_;                // algebra indices of layer 2
	std::vector<double> pair_inverse_;       // inverse of the pair-bracket matrix, row major
};

// c(G,d) on D_r: sup over d(x) = r of max_s |a_s(x)|.
EmpiricalConstant word_constant(const WordSystem& ws, const HomogeneousMetric& m, const SampleOptions& opt,
                                double r = 1.0);

// sup |pi_1(xi - eta)| / d(exp xi, exp eta) over the gauge ball of radius nu.
EmpiricalConstant estimate_first_layer_constant(const HomogeneousMetric& m, double nu, const SampleOptions& opt);
// K_U for each i: sup |pi^i(log x)| / d(x)^i over d(x) <= U.
std::vector<EmpiricalConstant> verify_projection_estimate(const HomogeneousMetric& m, double u,
                                                          const SampleOptions& opt);
// sup d(exp xi) / |xi|^{1/step} over |xi| <= nu.
EmpiricalConstant estimate_rhonormiota(const HomogeneousMetric& m, double nu, const SampleOptions& opt);
// sup |(-xi) o eta| / |xi - eta| over |xi|, |eta| <= nu.
EmpiricalConstant estimate_leftinveucl(const GradedAlgebra& g, double nu, const SampleOptions& opt);
// alpha_n(nu): sup |c_n(X,Y)| / |[X,Y]| over |X|, |Y| <= nu with [X,Y] != 0.
EmpiricalConstant estimate_bilinear_constant(const GradedAlgebra& g, int n, double nu, const SampleOptions& opt);
// C(n,nu): sup |R_n(X,Y)| / |X+Y|^3 over |X|, |Y| <= nu.
EmpiricalConstant estimate_remainder_constant(const GradedAlgebra& g, int n, double nu, const SampleOptions& opt);
// gamma_n: |c_n(X+D1,Y+D2) - c_n(X,Y)| / (nu^(n-1) max(|D1|,|D2|)) for one configuration,
// and its sup over X, Y, D1, D2 in the ball of radius nu.
double cn_difference_ratio(const GradedAlgebra& g, int n, const RVec& x, const RVec& y, const RVec& d1,
                           const RVec& d2, double nu);
EmpiricalConstant cn_difference_bound(const GradedAlgebra& g, int n, double nu, const SampleOptions& opt);
// sup d(exp xi, exp eta) / |xi - eta|^{1/step} over |xi|, |eta| <= nu.
EmpiricalConstant estimate_rhoestnorm(const HomogeneousMetric& m, double nu, const SampleOptions& opt);
// Two sups over d(x), d(y) <= nu: d(y^-1 x y) / |log x|^{1/step} and d(y^-1 x y) / d(x)^{1/step}.
std::pair<EmpiricalConstant, EmpiricalConstant> verify_conjugation_estimate(const HomogeneousMetric& m, double nu,
                                                                            const SampleOptions& opt);
// sup d(A_1..A_N, B_1..B_N) / sum d(A_j,B_j)^{1/step} over admissible factors.
EmpiricalConstant verify_product_estimate(const HomogeneousMetric& m, double nu, int n_factors,
                                          const SampleOptions& opt);
// sup N(x o y) / (N(x) + N(y)).
EmpiricalConstant quasi_triangle_constant(const HomogeneousMetric& m, const SampleOptions& opt);

} // namespace carnot
