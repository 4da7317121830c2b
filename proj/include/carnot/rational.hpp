#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

namespace carnot {

using Rational = mpq_class;
using QVec = std::vector<Rational>;
using RVec = std::vector<double>;

// Accepts "p", "-p", "p/q". Throws std::invalid_argument on anything else.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

// Exact value of a finite double.
Rational exact_from_double(double x);

RVec to_double(const QVec& v);
QVec to_rational(const RVec& v);

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double x) { return x == 0.0; }

// Lets the same templates run over exact and float scalars.
template <class T>
T scalar_cast(const Rational& q);
template <>
inline Rational scalar_cast<Rational>(const Rational& q) { return q; }
template <>
inline double scalar_cast<double>(const Rational& q) { return q.get_d(); }

template <class T>
std::vector<T> zeros(std::size_t n) { return std::vector<T>(n, T(0)); }

template <class T>
std::vector<T> add(const std::vector<T>& a, const std::vector<T>& b)
{
	std::vector<T> r(a.size());
	for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
	return r;
}

template <class T>
std::vector<T> sub(const std::vector<T>& a, const std::vector<T>& b)
{
	std::vector<T> r(a.size());
	for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
	return r;
}

template <class T>
std::vector<T> scale(const std::type_identity_t<T>& s, const std::vector<T>& a)
{
	std::vector<T> r(a.size());
	for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
	return r;
}

template <class T>
void axpy(const std::type_identity_t<T>& s, const std::vector<T>& x, std::vector<T>& y)
{
	for (std::size_t i = 0; i < x.size(); ++i)
		if (!is_zero(x[i])) y[i] += s * x[i];
}

template <class T>
std::vector<T> negate(const std::vector<T>& a)
{
	std::vector<T> r(a.size());
	for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
	return r;
}

template <class T>
bool is_zero_vector(const std::vector<T>& a)
{
	for (const auto& x : a)
		if (!is_zero(x)) return false;
	return true;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b)
{
	T s(0);
	for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
	return s;
}

inline double norm2(const RVec& a) { return std::sqrt(dot(a, a)); }
inline double norm_inf(const RVec& a)
{
	double m = 0;
	for (double x : a) m = std::max(m, std::abs(x));
	return m;
}

} // namespace carnot
