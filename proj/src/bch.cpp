#include "carnot/bch.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace carnot {

Rational bernoulli(int n)
{
	// Akiyama-Tanigawa gives B_1 = +1/2; flip it to the -1/2 convention.
	std::vector<Rational> a(static_cast<std::size_t>(n) + 1);
	for (int m = 0; m <= n; ++m)
	{
		a[static_cast<std::size_t>(m)] = Rational(1, m + 1);
		for (int j = m; j >= 1; --j)
			a[static_cast<std::size_t>(j) - 1] = j * (a[static_cast<std::size_t>(j) - 1] - a[static_cast<std::size_t>(j)]);
	}
	Rational b = a[0];
	if (n == 1) b = -b;
	return b;
}

Rational bch_k_coefficient(int two_p)
{
	Rational fact = 1;
	for (int k = 2; k <= two_p; ++k) fact *= k;
	return bernoulli(two_p) / fact;
}

BchTermCache::BchTermCache(int step) : step_(step), basis_(&hall_basis(2, step))
{
	const GradedAlgebra& f = basis_->algebra();
	auto c = bch_terms_recursive<Rational>(f, f.basis_vector(0), f.basis_vector(1), step);
	terms_.assign(static_cast<std::size_t>(step) + 1, QVec(static_cast<std::size_t>(f.dim())));
	sum_ = QVec(static_cast<std::size_t>(f.dim()));
	for (int n = 1; n <= step; ++n)
	{
		terms_[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n)];
		sum_ = add(sum_, c[static_cast<std::size_t>(n)]);
	}
}

const BchTermCache& BchTermCache::for_step(int step)
{
	static std::mutex mu;
	static std::map<int, std::unique_ptr<BchTermCache>> cache;
	std::lock_guard<std::mutex> lock(mu);
	auto& slot = cache[step];
	if (!slot) slot.reset(new BchTermCache(step));
	return *slot;
}

QMatrix exp_differential(const GradedAlgebra& g, const QVec& x)
{
	std::vector<QVec> cols;
	for (int j = 0; j < g.dim(); ++j) cols.push_back(exp_differential_apply(g, x, g.basis_vector(j)));
	return QMatrix::from_columns(cols, static_cast<std::size_t>(g.dim()));
}

LnDecomposition decompose_cn(int n)
{
	if (n < 2) throw std::out_of_range("decompose_cn: n must be at least 2");
	const HallBasis& hb = hall_basis(2, n);
	const GradedAlgebra& f = hb.algebra();
	QVec a1 = f.basis_vector(0), a2 = f.basis_vector(1);
	QVec cn = bch_terms_recursive<Rational>(f, a1, a2, n)[static_cast<std::size_t>(n)];

	LnDecomposition d;
	d.n = n;
	for (int mask = 0; mask < (1 << (n - 1)); ++mask)
	{
		std::vector<int> alpha;
		for (int b = n - 2; b >= 0; --b) alpha.push_back((mask >> b) & 1 ? 2 : 1);
		d.alphas.push_back(alpha);
	}
	std::vector<QVec> cols;
	for (const auto& alpha : d.alphas) cols.push_back(ln_alpha(f, alpha, a1, a2));
	auto sol = solve(QMatrix::from_columns(cols, static_cast<std::size_t>(f.dim())), cn);
	if (!sol) throw std::logic_error("c_n is not in the span of the L_n words");
	d.coefficients = *sol;
	return d;
}

namespace {

struct OracleSeries
{
	int degree;
	// nonzero coefficients of log(exp a exp b), words of length >= 1
	std::vector<std::pair<Word, Rational>> terms;
};

const OracleSeries& oracle_series(int degree)
{
	static std::mutex mu;
	static std::map<int, std::unique_ptr<OracleSeries>> cache;
	std::lock_guard<std::mutex> lock(mu);
	auto& slot = cache[degree];
	if (!slot)
	{
		FreeSeries a = FreeSeries::letter(2, degree, 0), b = FreeSeries::letter(2, degree, 1);
		FreeSeries z = (a.exp() * b.exp()).log();
		slot = std::make_unique<OracleSeries>();
		slot->degree = degree;
		for (const auto& [w, c] : z.terms())
			if (!w.empty()) slot->terms.emplace_back(w, c);
	}
	return *slot;
}

template <class T>
std::vector<T> oracle_product(const GradedAlgebra& g, const std::vector<T>& x, const std::vector<T>& y, int degree)
{
	if (degree < 0) degree = g.step();
	if (degree < g.step())
		throw std::invalid_argument("series oracle truncated at degree " + std::to_string(degree) + " below step " +
		                            std::to_string(g.step()));
	const OracleSeries& s = oracle_series(degree);
	// Dynkin-Specht-Wever: a homogeneous Lie element P of degree n equals
	// (1/n) times the right-normed bracketing of its words.
	std::map<Word, std::vector<T>> memo;
	std::function<const std::vector<T>&(const Word&, std::size_t)> right_normed = [&](const Word& w,
	                                                                                  std::size_t from) -> const std::vector<T>& {
		Word key(w.begin() + static_cast<long>(from), w.end());
		auto it = memo.find(key);
		if (it != memo.end()) return it->second;
		std::vector<T> v;
		const std::vector<T>& head = w[from] == 0 ? x : y;
		if (from + 1 == w.size())
			v = head;
		else
			v = g.bracket(head, right_normed(w, from + 1));
		return memo.emplace(std::move(key), std::move(v)).first->second;
	};
	std::vector<T> r(x.size(), T(0));
	for (const auto& [w, c] : s.terms)
	{
		const std::vector<T>& v = right_normed(w, 0);
		if (is_zero_vector(v)) continue;
		T coef = scalar_cast<T>(Rational(c / static_cast<long>(w.size())));
		axpy(coef, v, r);
	}
	return r;
}

} // namespace

QVec series_oracle_product(const GradedAlgebra& g, const QVec& x, const QVec& y, int degree)
{
	return oracle_product(g, x, y, degree);
}

RVec series_oracle_product(const GradedAlgebra& g, const RVec& x, const RVec& y, int degree)
{
	return oracle_product(g, x, y, degree);
}

} // namespace carnot
