#pragma once

#include "carnot/free_lie.hpp"
#include "carnot/graded_algebra.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace carnot {

// Bernoulli numbers with B_1 = -1/2, B_2 = 1/6.
Rational bernoulli(int n);
// K_{2p} = B_{2p} / (2p)!
Rational bch_k_coefficient(int two_p);

// c_1..c_nmax evaluated by the recursion
//   (n+1) c_{n+1} = 1/2 [X-Y, c_n]
//                 + sum_{p>=1, 2p<=n} K_{2p} sum_{k_1+..+k_2p=n} [c_k1,[..,[c_k2p, X+Y]..]]
template <class T>
std::vector<std::vector<T>> bch_terms_recursive(const GradedAlgebra& g, const std::vector<T>& x,
                                                const std::vector<T>& y, int nmax);

// Symbolic c_n in free_nilpotent(2, step), computed once per step and reused.
class BchTermCache
{
public:
	static const BchTermCache& for_step(int step);

	int step() const { return step_; }
	const HallBasis& basis() const { return *basis_; }
	// Hall coordinates of c_n(X1, X2), n = 1..step.
	const QVec& term(int n) const { return terms_[static_cast<std::size_t>(n)]; }
	const QVec& product() const { return sum_; }

private:
	explicit BchTermCache(int step);
	int step_;
	const HallBasis* basis_;
	std::vector<QVec> terms_;
	QVec sum_;
};

template <class T>
std::vector<T> combine_hall(const std::vector<std::vector<T>>& values, const QVec& coeffs)
{
	std::vector<T> r(values.empty() ? 0 : values[0].size(), T(0));
	for (std::size_t h = 0; h < coeffs.size(); ++h)
		if (!is_zero(coeffs[h])) axpy(scalar_cast<T>(coeffs[h]), values[h], r);
	return r;
}

template <class T>
std::vector<T> bch_term(const GradedAlgebra& g, int n, const std::vector<T>& x, const std::vector<T>& y)
{
	if (n < 1 || n > g.step())
		throw std::out_of_range("bch_term: n=" + std::to_string(n) + " outside 1.." + std::to_string(g.step()));
	const BchTermCache& cache = BchTermCache::for_step(g.step());
	return combine_hall(cache.basis().evaluate(g, std::vector<std::vector<T>>{x, y}), cache.term(n));
}

template <class T>
std::vector<T> group_product(const GradedAlgebra& g, const std::vector<T>& x, const std::vector<T>& y)
{
	if (static_cast<int>(x.size()) != g.dim() || static_cast<int>(y.size()) != g.dim())
		throw std::invalid_argument("group_product: vector length does not match the algebra");
	const BchTermCache& cache = BchTermCache::for_step(g.step());
	return combine_hall(cache.basis().evaluate(g, std::vector<std::vector<T>>{x, y}), cache.product());
}

template <class T>
std::vector<T> group_inverse(const std::vector<T>& x) { return negate(x); }

// Product of a list of elements, left to right.
template <class T>
std::vector<T> group_product_all(const GradedAlgebra& g, const std::vector<std::vector<T>>& xs)
{
	std::vector<T> acc(static_cast<std::size_t>(g.dim()), T(0));
	for (const auto& x : xs) acc = group_product(g, acc, x);
	return acc;
}

// Matrix of Id - sum_{n=2}^{step} ((-1)^n / n!) ad(X)^{n-1}.
QMatrix exp_differential(const GradedAlgebra& g, const QVec& x);

template <class T>
std::vector<T> exp_differential_apply(const GradedAlgebra& g, const std::vector<T>& x, const std::vector<T>& v)
{
	std::vector<T> r = v, term = v;
	T fact(1);
	for (int n = 2; n <= g.step(); ++n)
	{
		term = g.bracket(x, term);
		fact *= T(n);
		T c = (n % 2 == 0 ? T(-1) : T(1)) / fact;
		axpy(c, term, r);
	}
	return r;
}

struct LnDecomposition
{
	int n = 0;
	// alpha in {1,2}^{n-1}, lexicographic
	std::vector<std::vector<int>> alphas;
	std::vector<Rational> coefficients;
};

LnDecomposition decompose_cn(int n);

// L_n(A_alpha, A_1 + A_2) = [A_a1,[A_a2,...,[A_a(n-1), A_1+A_2]]]
template <class T>
std::vector<T> ln_alpha(const GradedAlgebra& g, const std::vector<int>& alpha, const std::vector<T>& a1,
                        const std::vector<T>& a2)
{
	std::vector<T> r = add(a1, a2);
	for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) r = g.bracket(*it == 1 ? a1 : a2, r);
	return r;
}

template <class T>
std::vector<T> evaluate_decomposition(const GradedAlgebra& g, const LnDecomposition& d, const std::vector<T>& a1,
                                      const std::vector<T>& a2)
{
	std::vector<T> r(a1.size(), T(0));
	for (std::size_t i = 0; i < d.alphas.size(); ++i)
		if (!is_zero(d.coefficients[i])) axpy(scalar_cast<T>(d.coefficients[i]), ln_alpha(g, d.alphas[i], a1, a2), r);
	return r;
}

// R_n = c_n - ((-1)^{n-1}/n!) [(Y-X)/2, X+Y]_{n-1}
template <class T>
std::vector<T> cn_main_term(const GradedAlgebra& g, int n, const std::vector<T>& x, const std::vector<T>& y)
{
	T fact(1);
	for (int k = 2; k <= n; ++k) fact *= T(k);
	T c = ((n - 1) % 2 == 0 ? T(1) : T(-1)) / fact;
	std::vector<T> half = scale(T(1) / T(2), sub(y, x));
	return scale(c, iterated_bracket(g, half, add(x, y), n - 1));
}

template <class T>
std::vector<T> cn_remainder(const GradedAlgebra& g, int n, const std::vector<T>& x, const std::vector<T>& y)
{
	if (n < 2 || n > g.step()) throw std::out_of_range("cn_remainder: n outside 2..step");
	return sub(bch_term(g, n, x, y), cn_main_term(g, n, x, y));
}

// log(exp X exp Y) through the truncated free associative algebra and the
// Dynkin map; independent of the recursion above.
QVec series_oracle_product(const GradedAlgebra& g, const QVec& x, const QVec& y, int degree = -1);
RVec series_oracle_product(const GradedAlgebra& g, const RVec& x, const RVec& y, int degree = -1);

// ---- implementation details ----

namespace detail {

template <class F>
void for_each_composition(int n, int parts, std::vector<int>& acc, F&& f)
{
	if (parts == 0)
	{
		if (n == 0) f(acc);
		return;
	}
	for (int k = 1; k <= n - (parts - 1); ++k)
	{
		acc.push_back(k);
		for_each_composition(n - k, parts - 1, acc, f);
		acc.pop_back();
	}
}

} // namespace detail

template <class T>
std::vector<std::vector<T>> bch_terms_recursive(const GradedAlgebra& g, const std::vector<T>& x,
                                                const std::vector<T>& y, int nmax)
{
	std::vector<std::vector<T>> c(static_cast<std::size_t>(nmax) + 1);
	std::vector<T> s = add(x, y), d = sub(x, y);
	c[1] = s;
	for (int n = 1; n < nmax; ++n)
	{
		std::vector<T> next = scale(T(1) / T(2), g.bracket(d, c[static_cast<std::size_t>(n)]));
		for (int p = 1; 2 * p <= n; ++p)
		{
			T k = scalar_cast<T>(bch_k_coefficient(2 * p));
			std::vector<int> acc;
			detail::for_each_composition(n, 2 * p, acc, [&](const std::vector<int>& ks) {
				std::vector<T> r = s;
				for (auto it = ks.rbegin(); it != ks.rend(); ++it) r = g.bracket(c[static_cast<std::size_t>(*it)], r);
				axpy(k, r, next);
			});
		}
		c[static_cast<std::size_t>(n) + 1] = scale(T(1) / T(n + 1), next);
	}
	return c;
}

} // namespace carnot
