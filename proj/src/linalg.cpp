#include "carnot/linalg.hpp"

#include <stdexcept>

namespace carnot {

Rational parse_rational(const std::string& text)
{
	std::string s;
	for (char c : text)
		if (c != ' ' && c != '\t' && c != '+') s += c;
	if (s.empty()) throw std::invalid_argument("empty rational");
	auto digits = [](const std::string& t, bool allow_sign) {
		if (t.empty()) return false;
		std::size_t i = 0;
		if (allow_sign && t[0] == '-') i = 1;
		if (i == t.size()) return false;
		for (; i < t.size(); ++i)
			if (t[i] < '0' || t[i] > '9') return false;
		return true;
	};
	auto dotpos = s.find('.');
	if (dotpos != std::string::npos && s.find('/') == std::string::npos)
	{
		// exact decimal: a.b -> ab / 10^len(b)
		std::string frac = s.substr(dotpos + 1), whole = s.substr(0, dotpos);
		if (whole.empty() || whole == "-") whole += "0";
		if (!digits(whole, true) || (!frac.empty() && !digits(frac, false)))
			throw std::invalid_argument("malformed rational '" + text + "'");
		mpz_class den = 1;
		for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
		bool neg = whole[0] == '-';
		mpz_class w(neg ? whole.substr(1) : whole);
		mpz_class f(frac.empty() ? "0" : frac);
		Rational q(w * den + f, den);
		q.canonicalize();
		return neg ? Rational(-q) : q;
	}
	auto slash = s.find('/');
	std::string num = s.substr(0, slash);
	std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
	if (!digits(num, true) || !digits(den, false))
		throw std::invalid_argument("malformed rational '" + text + "'");
	mpz_class d(den);
	if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
	Rational q(mpz_class(num), d);
	q.canonicalize();
	return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational exact_from_double(double x)
{
	if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
	return Rational(x);
}

RVec to_double(const QVec& v)
{
	RVec r(v.size());
	for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].get_d();
	return r;
}

QVec to_rational(const RVec& v)
{
	QVec r(v.size());
	for (std::size_t i = 0; i < v.size(); ++i) r[i] = exact_from_double(v[i]);
	return r;
}

QMatrix::QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

QMatrix QMatrix::identity(std::size_t n)
{
	QMatrix m(n, n);
	for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
	return m;
}

QMatrix QMatrix::from_rows(const std::vector<QVec>& rows, std::size_t cols)
{
	QMatrix m(rows.size(), cols);
	for (std::size_t i = 0; i < rows.size(); ++i)
		for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
	return m;
}

QMatrix QMatrix::from_columns(const std::vector<QVec>& cols, std::size_t rows)
{
	QMatrix m(rows, cols.size());
	for (std::size_t j = 0; j < cols.size(); ++j)
		for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
	return m;
}

QVec QMatrix::row(std::size_t i) const
{
	return QVec(a_.begin() + static_cast<long>(i * cols_), a_.begin() + static_cast<long>((i + 1) * cols_));
}

QVec QMatrix::col(std::size_t j) const
{
	QVec c(rows_);
	for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
	return c;
}

QMatrix QMatrix::transpose() const
{
	QMatrix t(cols_, rows_);
	for (std::size_t i = 0; i < rows_; ++i)
		for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
	return t;
}

QMatrix QMatrix::operator*(const QMatrix& o) const
{
	if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
	QMatrix r(rows_, o.cols_);
	for (std::size_t i = 0; i < rows_; ++i)
		for (std::size_t k = 0; k < cols_; ++k)
		{
			const Rational& x = (*this)(i, k);
			if (sgn(x) == 0) continue;
			for (std::size_t j = 0; j < o.cols_; ++j)
				if (sgn(o(k, j)) != 0) r(i, j) += x * o(k, j);
		}
	return r;
}

QMatrix QMatrix::operator+(const QMatrix& o) const
{
	QMatrix r = *this;
	for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
	return r;
}

QMatrix QMatrix::operator-(const QMatrix& o) const
{
	QMatrix r = *this;
	for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
	return r;
}

QVec QMatrix::apply(const QVec& x) const
{
	if (x.size() != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
	QVec y(rows_);
	for (std::size_t i = 0; i < rows_; ++i)
		for (std::size_t j = 0; j < cols_; ++j)
			if (sgn(x[j]) != 0 && sgn((*this)(i, j)) != 0) y[i] += (*this)(i, j) * x[j];
	return y;
}

bool QMatrix::operator==(const QMatrix& o) const
{
	return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

bool QMatrix::is_zero() const
{
	for (const auto& x : a_)
		if (sgn(x) != 0) return false;
	return true;
}

RVec QMatrix::to_double_rowmajor() const
{
	RVec r(a_.size());
	for (std::size_t i = 0; i < a_.size(); ++i) r[i] = a_[i].get_d();
	return r;
}

Rref rref(QMatrix m)
{
	Rref out;
	std::size_t r = 0;
	for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c)
	{
		std::size_t p = r;
		while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
		if (p == m.rows()) continue;
		if (p != r)
			for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
		Rational inv = 1 / m(r, c);
		for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
		for (std::size_t i = 0; i < m.rows(); ++i)
		{
			if (i == r || sgn(m(i, c)) == 0) continue;
			Rational f = m(i, c);
			for (std::size_t j = c; j < m.cols(); ++j)
				if (sgn(m(r, j)) != 0) m(i, j) -= f * m(r, j);
		}
		out.pivots.push_back(c);
		++r;
	}
	out.m = std::move(m);
	return out;
}

std::size_t rank(const QMatrix& m) { return rref(m).pivots.size(); }

std::vector<QVec> nullspace(const QMatrix& m)
{
	Rref rr = rref(m);
	std::vector<bool> is_pivot(m.cols(), false);
	for (auto p : rr.pivots) is_pivot[p] = true;
	std::vector<QVec> basis;
	for (std::size_t f = 0; f < m.cols(); ++f)
	{
		if (is_pivot[f]) continue;
		QVec v(m.cols());
		v[f] = 1;
		for (std::size_t r = 0; r < rr.pivots.size(); ++r) v[rr.pivots[r]] = -rr.m(r, f);
		basis.push_back(std::move(v));
	}
	return basis;
}

std::optional<QVec> solve(const QMatrix& a, const QVec& b)
{
	QMatrix aug(a.rows(), a.cols() + 1);
	for (std::size_t i = 0; i < a.rows(); ++i)
	{
		for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
		aug(i, a.cols()) = b[i];
	}
	Rref rr = rref(aug);
	if (!rr.pivots.empty() && rr.pivots.back() == a.cols()) return std::nullopt;
	QVec x(a.cols());
	for (std::size_t r = 0; r < rr.pivots.size(); ++r) x[rr.pivots[r]] = rr.m(r, a.cols());
	return x;
}

std::optional<QMatrix> inverse(const QMatrix& m)
{
	if (m.rows() != m.cols()) return std::nullopt;
	std::size_t n = m.rows();
	QMatrix aug(n, 2 * n);
	for (std::size_t i = 0; i < n; ++i)
	{
		for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
		aug(i, n + i) = 1;
	}
	Rref rr = rref(aug);
	if (rr.pivots.size() < n || rr.pivots[n - 1] != n - 1) return std::nullopt;
	QMatrix inv(n, n);
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; j < n; ++j) inv(i, j) = rr.m(i, n + j);
	return inv;
}

Rational determinant(QMatrix m)
{
	if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
	std::size_t n = m.rows();
	Rational det = 1;
	for (std::size_t c = 0; c < n; ++c)
	{
		std::size_t p = c;
		while (p < n && sgn(m(p, c)) == 0) ++p;
		if (p == n) return 0;
		if (p != c)
		{
			for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
			det = -det;
		}
		det *= m(c, c);
		for (std::size_t i = c + 1; i < n; ++i)
		{
			if (sgn(m(i, c)) == 0) continue;
			Rational f = m(i, c) / m(c, c);
			for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
		}
	}
	return det;
}

Subspace Subspace::span(std::size_t ambient, const std::vector<QVec>& vectors)
{
	Subspace s(ambient);
	if (vectors.empty()) return s;
	for (const auto& v : vectors)
		if (v.size() != ambient) throw std::invalid_argument("vector length does not match ambient dimension");
	Rref rr = rref(QMatrix::from_rows(vectors, ambient));
	for (std::size_t r = 0; r < rr.pivots.size(); ++r) s.basis_.push_back(rr.m.row(r));
	s.pivots_ = rr.pivots;
	return s;
}

Subspace Subspace::whole(std::size_t ambient)
{
	std::vector<QVec> e;
	for (std::size_t i = 0; i < ambient; ++i)
	{
		QVec v(ambient);
		v[i] = 1;
		e.push_back(std::move(v));
	}
	return span(ambient, e);
}

Subspace Subspace::coordinates(std::size_t ambient, const std::vector<int>& indices)
{
	std::vector<QVec> e;
	for (int i : indices)
	{
		QVec v(ambient);
		v[static_cast<std::size_t>(i)] = 1;
		e.push_back(std::move(v));
	}
	return span(ambient, e);
}

std::optional<QVec> Subspace::coordinates_of(const QVec& v) const
{
	// With a reduced echelon basis the coefficients are the pivot entries.
	QVec c(basis_.size());
	QVec r = v;
	for (std::size_t k = 0; k < basis_.size(); ++k)
	{
		c[k] = r[pivots_[k]];
		if (sgn(c[k]) != 0)
			for (std::size_t j = 0; j < n_; ++j)
				if (sgn(basis_[k][j]) != 0) r[j] -= c[k] * basis_[k][j];
	}
	if (!is_zero_vector(r)) return std::nullopt;
	return c;
}

bool Subspace::contains(const QVec& v) const { return coordinates_of(v).has_value(); }

bool Subspace::contains(const Subspace& s) const
{
	for (const auto& v : s.basis_)
		if (!contains(v)) return false;
	return true;
}

Subspace Subspace::sum(const Subspace& o) const
{
	std::vector<QVec> all = basis_;
	all.insert(all.end(), o.basis_.begin(), o.basis_.end());
	return span(n_, all);
}

Subspace Subspace::intersect(const Subspace& o) const
{
	if (basis_.empty() || o.basis_.empty()) return Subspace(n_);
	// x = sum a_i u_i = sum b_j v_j  <=>  [U^T | -V^T] (a,b) = 0
	std::size_t p = basis_.size(), q = o.basis_.size();
	QMatrix m(n_, p + q);
	for (std::size_t i = 0; i < p; ++i)
		for (std::size_t r = 0; r < n_; ++r) m(r, i) = basis_[i][r];
	for (std::size_t j = 0; j < q; ++j)
		for (std::size_t r = 0; r < n_; ++r) m(r, p + j) = -o.basis_[j][r];
	std::vector<QVec> vs;
	for (const auto& ab : nullspace(m))
	{
		QVec x(n_);
		for (std::size_t i = 0; i < p; ++i)
			if (sgn(ab[i]) != 0) axpy(ab[i], basis_[i], x);
		vs.push_back(std::move(x));
	}
	return span(n_, vs);
}

Subspace Subspace::orthogonal() const
{
	if (basis_.empty()) return whole(n_);
	return span(n_, nullspace(QMatrix::from_rows(basis_, n_)));
}

std::vector<QVec> extend_basis(const Subspace& inner, const std::vector<QVec>& candidates)
{
	std::vector<QVec> picked;
	Subspace acc = inner;
	for (const auto& v : candidates)
	{
		if (acc.contains(v)) continue;
		picked.push_back(v);
		acc = acc.sum(Subspace::span(inner.ambient(), {v}));
	}
	return picked;
}

std::vector<QVec> complement_in(const Subspace& inner, const Subspace& outer)
{
	return extend_basis(inner, outer.basis());
}

} // namespace carnot
