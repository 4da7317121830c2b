#include "carnot/free_lie.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace carnot {

namespace {

long long mobius(int n)
{
	int m = 1;
	for (int d = 2; d * d <= n; ++d)
		if (n % d == 0)
		{
			n /= d;
			if (n % d == 0) return 0;
			m = -m;
		}
	if (n > 1) m = -m;
	return m;
}

long long ipow(long long b, int e)
{
	long long r = 1;
	for (int i = 0; i < e; ++i) r *= b;
	return r;
}

WordPoly poly_mul(const WordPoly& a, const WordPoly& b)
{
	WordPoly r;
	for (const auto& [u, x] : a)
		for (const auto& [v, y] : b)
		{
			Word w = u;
			w.insert(w.end(), v.begin(), v.end());
			r[w] += x * y;
		}
	return r;
}

WordPoly poly_commutator(const WordPoly& a, const WordPoly& b)
{
	WordPoly r = poly_mul(a, b);
	for (const auto& [w, c] : poly_mul(b, a)) r[w] -= c;
	for (auto it = r.begin(); it != r.end();)
		it = sgn(it->second) == 0 ? r.erase(it) : std::next(it);
	return r;
}

} // namespace

long long witt_dimension(int p, int n)
{
	long long s = 0;
	for (int d = 1; d <= n; ++d)
		if (n % d == 0) s += mobius(d) * ipow(p, n / d);
	return s / n;
}

HallBasis::HallBasis(int letters, int max_degree) : p_(letters), deg_(max_degree)
{
	if (letters < 1 || max_degree < 1) throw std::invalid_argument("free nilpotent algebra needs p >= 1 and step >= 1");
	long long total = 0;
	for (int n = 1; n <= max_degree; ++n)
	{
		total += witt_dimension(letters, n);
		if (total > kFreeNilpotentBudget)
			throw std::invalid_argument("free_nilpotent(" + std::to_string(letters) + "," + std::to_string(max_degree) +
			                            ") exceeds the dimension budget of " + std::to_string(kFreeNilpotentBudget));
	}

	for (int a = 0; a < letters; ++a)
	{
		HallElement e;
		e.generator = a;
		e.name = "X" + std::to_string(a + 1);
		elems_.push_back(e);
		polys_.push_back(WordPoly{{Word{static_cast<std::uint8_t>(a)}, Rational(1)}});
	}
	for (int d = 2; d <= max_degree; ++d)
	{
		int existing = static_cast<int>(elems_.size());
		for (int v = 0; v < existing; ++v)
			for (int u = v + 1; u < existing; ++u)
			{
				const auto& eu = elems_[static_cast<std::size_t>(u)];
				const auto& ev = elems_[static_cast<std::size_t>(v)];
				if (eu.degree + ev.degree != d) continue;
				if (eu.degree > 1 && eu.right > v) continue;
				HallElement e;
				e.degree = d;
				e.left = u;
				e.right = v;
				e.name = "[" + eu.name + "," + ev.name + "]";
				WordPoly poly = poly_commutator(polys_[static_cast<std::size_t>(u)], polys_[static_cast<std::size_t>(v)]);
				elems_.push_back(std::move(e));
				polys_.push_back(std::move(poly));
			}
		if (static_cast<long long>(elems_.size() - static_cast<std::size_t>(existing)) != witt_dimension(letters, d))
			throw std::logic_error("Hall basis enumeration disagrees with the Witt count");
	}

	// Exact coordinate solver per degree through an invertible block of word columns.
	solvers_.resize(static_cast<std::size_t>(max_degree) + 1);
	for (int d = 1; d <= max_degree; ++d)
	{
		DegreeSolver& s = solvers_[static_cast<std::size_t>(d)];
		std::map<Word, int> word_index;
		std::vector<Word> words;
		for (int h = 0; h < size(); ++h)
		{
			if (elems_[static_cast<std::size_t>(h)].degree != d) continue;
			s.elements.push_back(h);
			for (const auto& [w, c] : polys_[static_cast<std::size_t>(h)])
				if (word_index.emplace(w, static_cast<int>(words.size())).second) words.push_back(w);
		}
		QMatrix m(s.elements.size(), words.size());
		for (std::size_t r = 0; r < s.elements.size(); ++r)
			for (const auto& [w, c] : polys_[static_cast<std::size_t>(s.elements[r])])
				m(r, static_cast<std::size_t>(word_index[w])) = c;
		Rref rr = rref(m);
		if (rr.pivots.size() != s.elements.size()) throw std::logic_error("Hall polynomials are not independent");
		QMatrix block(s.elements.size(), s.elements.size());
		for (std::size_t c = 0; c < rr.pivots.size(); ++c)
		{
			s.pivot_words.push_back(words[rr.pivots[c]]);
			for (std::size_t r = 0; r < s.elements.size(); ++r) block(c, r) = m(r, rr.pivots[c]);
		}
		s.inverse = *inverse(block);
	}

	std::vector<int> layer_of;
	std::vector<std::string> names;
	for (const auto& e : elems_)
	{
		layer_of.push_back(e.degree);
		names.push_back(e.name);
	}
	std::vector<BracketEntry> brackets;
	for (int i = 0; i < size(); ++i)
		for (int j = i + 1; j < size(); ++j)
		{
			int d = elems_[static_cast<std::size_t>(i)].degree + elems_[static_cast<std::size_t>(j)].degree;
			if (d > max_degree) continue;
			QVec c = coordinates(poly_commutator(polys_[static_cast<std::size_t>(i)], polys_[static_cast<std::size_t>(j)]), d);
			BracketEntry e{i, j, {}};
			for (int k = 0; k < size(); ++k)
				if (sgn(c[static_cast<std::size_t>(k)]) != 0) e.terms.push_back({k, c[static_cast<std::size_t>(k)]});
			if (!e.terms.empty()) brackets.push_back(std::move(e));
		}
	alg_ = std::make_shared<GradedAlgebra>("free_nilpotent_" + std::to_string(letters) + "_" + std::to_string(max_degree),
	                                       layer_of, names, brackets);
}

QVec HallBasis::coordinates(const WordPoly& lie_poly, int degree) const
{
	QVec out(static_cast<std::size_t>(size()));
	if (degree < 1 || degree > deg_) return out;
	const DegreeSolver& s = solvers_[static_cast<std::size_t>(degree)];
	QVec rhs(s.pivot_words.size());
	for (std::size_t c = 0; c < s.pivot_words.size(); ++c)
	{
		auto it = lie_poly.find(s.pivot_words[c]);
		if (it != lie_poly.end()) rhs[c] = it->second;
	}
	QVec a = s.inverse.apply(rhs);
	WordPoly check = lie_poly;
	for (std::size_t r = 0; r < s.elements.size(); ++r)
	{
		out[static_cast<std::size_t>(s.elements[r])] = a[r];
		if (sgn(a[r]) == 0) continue;
		for (const auto& [w, c] : polys_[static_cast<std::size_t>(s.elements[r])]) check[w] -= a[r] * c;
	}
	for (const auto& [w, c] : check)
		if (sgn(c) != 0) throw std::invalid_argument("polynomial is not a homogeneous Lie element of that degree");
	return out;
}

const HallBasis& hall_basis(int letters, int max_degree)
{
	static std::mutex mu;
	static std::map<std::pair<int, int>, std::unique_ptr<HallBasis>> cache;
	std::lock_guard<std::mutex> lock(mu);
	auto& slot = cache[{letters, max_degree}];
	if (!slot) slot = std::make_unique<HallBasis>(letters, max_degree);
	return *slot;
}

QMatrix free_extension(int letters, int step, const GradedAlgebra& target, const std::vector<QVec>& images)
{
	if (static_cast<int>(images.size()) != letters) throw std::invalid_argument("need one image per generator");
	const HallBasis& hb = hall_basis(letters, step);
	auto val = hb.evaluate(target, images);
	return QMatrix::from_columns(val, static_cast<std::size_t>(target.dim()));
}

FreeSeries FreeSeries::constant(int letters, int degree, const Rational& c)
{
	FreeSeries s(letters, degree);
	s.add_term(Word{}, c);
	return s;
}

FreeSeries FreeSeries::letter(int letters, int degree, int a)
{
	FreeSeries s(letters, degree);
	s.add_term(Word{static_cast<std::uint8_t>(a)}, 1);
	return s;
}

void FreeSeries::add_term(const Word& w, const Rational& c)
{
	if (static_cast<int>(w.size()) > deg_ || sgn(c) == 0) return;
	Rational& slot = c_[w];
	slot += c;
	if (sgn(slot) == 0) c_.erase(w);
}

Rational FreeSeries::coefficient(const Word& w) const
{
	auto it = c_.find(w);
	return it == c_.end() ? Rational(0) : it->second;
}

FreeSeries FreeSeries::operator+(const FreeSeries& o) const
{
	FreeSeries r = *this;
	for (const auto& [w, c] : o.c_) r.add_term(w, c);
	return r;
}

FreeSeries FreeSeries::operator-(const FreeSeries& o) const
{
	FreeSeries r = *this;
	for (const auto& [w, c] : o.c_) r.add_term(w, -c);
	return r;
}

FreeSeries FreeSeries::operator*(const FreeSeries& o) const
{
	FreeSeries r(p_, deg_);
	for (const auto& [u, x] : c_)
		for (const auto& [v, y] : o.c_)
		{
			if (static_cast<int>(u.size() + v.size()) > deg_) continue;
			Word w = u;
			w.insert(w.end(), v.begin(), v.end());
			r.add_term(w, x * y);
		}
	return r;
}

FreeSeries FreeSeries::scaled(const Rational& s) const
{
	FreeSeries r(p_, deg_);
	for (const auto& [w, c] : c_) r.add_term(w, s * c);
	return r;
}

FreeSeries FreeSeries::exp() const
{
	if (sgn(coefficient(Word{})) != 0) throw std::invalid_argument("exp needs a series without constant term");
	FreeSeries result = constant(p_, deg_, 1);
	FreeSeries power = constant(p_, deg_, 1);
	Rational fact = 1;
	for (int k = 1; k <= deg_; ++k)
	{
		power = power * (*this);
		fact *= k;
		result = result + power.scaled(Rational(1) / fact);
	}
	return result;
}

FreeSeries FreeSeries::log() const
{
	if (coefficient(Word{}) != 1) throw std::invalid_argument("log needs a series with constant term 1");
	FreeSeries x = *this - constant(p_, deg_, 1);
	FreeSeries result(p_, deg_);
	FreeSeries power = constant(p_, deg_, 1);
	for (int k = 1; k <= deg_; ++k)
	{
		power = power * x;
		Rational c(k % 2 == 1 ? 1 : -1, k);
		result = result + power.scaled(c);
	}
	return result;
}

WordPoly FreeSeries::homogeneous_part(int n) const
{
	WordPoly r;
	for (const auto& [w, c] : c_)
		if (static_cast<int>(w.size()) == n) r[w] = c;
	return r;
}

} // namespace carnot
