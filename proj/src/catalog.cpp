#include "carnot/catalog.hpp"

#include "carnot/free_lie.hpp"

#include <regex>
#include <stdexcept>

namespace carnot {

namespace {

BracketEntry entry(int i, int j, int k, const Rational& c = 1) { return {i, j, {{k, c}}}; }

QVec column(const QMatrix& m, const QVec& x) { return m.apply(x); }

QMatrix j_of(const HTypeData& d, const QVec& z)
{
	QMatrix r(static_cast<std::size_t>(d.m), static_cast<std::size_t>(d.m));
	for (std::size_t k = 0; k < d.j.size(); ++k)
		if (sgn(z[k]) != 0)
			for (std::size_t a = 0; a < r.rows(); ++a)
				for (std::size_t b = 0; b < r.cols(); ++b) r(a, b) += z[k] * d.j[k](a, b);
	return r;
}

std::string vec_str(const QVec& v)
{
	std::string s = "(";
	for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
	return s + ")";
}

std::vector<QVec> probe_vectors(std::size_t n, const std::vector<QVec>& extra)
{
	std::vector<QVec> out;
	for (std::size_t i = 0; i < n; ++i)
	{
		QVec e(n);
		e[i] = 1;
		out.push_back(e);
		for (std::size_t j = i + 1; j < n; ++j)
		{
			QVec f(n);
			f[i] = 1;
			f[j] = 2;
			out.push_back(f);
		}
	}
	out.insert(out.end(), extra.begin(), extra.end());
	return out;
}

} // namespace

AlgebraPtr abelian(int k)
{
	if (k < 1) throw std::invalid_argument("abelian algebra needs k >= 1");
	std::vector<std::string> names;
	for (int i = 0; i < k; ++i) names.push_back("E" + std::to_string(i + 1));
	return std::make_shared<GradedAlgebra>("r" + std::to_string(k), std::vector<int>(static_cast<std::size_t>(k), 1),
	                                       names, std::vector<BracketEntry>{});
}

AlgebraPtr heisenberg(int n)
{
	if (n < 1) throw std::invalid_argument("heisenberg(n) needs n >= 1");
	std::vector<int> layers(static_cast<std::size_t>(2 * n), 1);
	layers.push_back(2);
	std::vector<std::string> names;
	std::vector<BracketEntry> br;
	for (int i = 0; i < n; ++i)
	{
		std::string s = n == 1 ? "" : std::to_string(i + 1);
		names.push_back("X" + s);
		names.push_back("Y" + s);
		br.push_back(entry(2 * i, 2 * i + 1, 2 * n));
	}
	names.push_back("Z");
	return std::make_shared<GradedAlgebra>("h" + std::to_string(n), layers, names, br);
}

AlgebraPtr complexified_heisenberg()
{
	std::vector<BracketEntry> br{entry(0, 1, 4), entry(2, 3, 4), entry(0, 2, 5), entry(1, 3, 5, -1)};
	return std::make_shared<GradedAlgebra>("h2_1", std::vector<int>{1, 1, 1, 1, 2, 2},
	                                       std::vector<std::string>{"R0", "R1", "R2", "R3", "Z1", "Z2"}, br);
}

AlgebraPtr free_nilpotent(int letters, int step) { return hall_basis(letters, step).algebra_ptr(); }

AlgebraPtr direct_product(const GradedAlgebra& a, const GradedAlgebra& b)
{
	// Interleave by layer so the product basis stays sorted.
	struct Slot
	{
		int which, index;
	};
	std::vector<Slot> order;
	int step = std::max(a.step(), b.step());
	for (int l = 1; l <= step; ++l)
	{
		for (int i : a.layer_indices(l)) order.push_back({0, i});
		for (int i : b.layer_indices(l)) order.push_back({1, i});
	}
	std::vector<int> pos_a(static_cast<std::size_t>(a.dim())), pos_b(static_cast<std::size_t>(b.dim()));
	std::vector<int> layers;
	std::vector<std::string> names;
	for (std::size_t p = 0; p < order.size(); ++p)
	{
		const auto& s = order[p];
		const GradedAlgebra& g = s.which == 0 ? a : b;
		(s.which == 0 ? pos_a : pos_b)[static_cast<std::size_t>(s.index)] = static_cast<int>(p);
		layers.push_back(g.layer_of(s.index));
		names.push_back((s.which == 0 ? "a." : "b.") + g.basis_names()[static_cast<std::size_t>(s.index)]);
	}
	std::vector<BracketEntry> br;
	auto copy = [&](const GradedAlgebra& g, const std::vector<int>& pos) {
		for (const auto& e : g.canonical_brackets())
		{
			BracketEntry f{pos[static_cast<std::size_t>(e.i)], pos[static_cast<std::size_t>(e.j)], {}};
			for (const auto& t : e.terms) f.terms.push_back({pos[static_cast<std::size_t>(t.k)], t.c});
			if (f.i > f.j)
			{
				std::swap(f.i, f.j);
				for (auto& t : f.terms) t.c = -t.c;
			}
			br.push_back(std::move(f));
		}
	};
	copy(a, pos_a);
	copy(b, pos_b);
	return std::make_shared<GradedAlgebra>(a.name() + "x" + b.name(), layers, names, br);
}

AlgebraPtr example_g42()
{
	std::vector<BracketEntry> br{entry(1, 2, 4), entry(1, 3, 5), entry(2, 3, 6)};
	return std::make_shared<GradedAlgebra>("g42", std::vector<int>{1, 1, 1, 1, 2, 2, 2},
	                                       std::vector<std::string>{"X1", "X2", "X3", "X4", "Z23", "Z24", "Z34"}, br);
}

AlgebraPtr h_type_from_j(const HTypeData& d, const std::string& name)
{
	int m = d.m, q = static_cast<int>(d.j.size());
	if (m < 1 || q < 1) throw std::invalid_argument("H-type data needs nonempty v and z");
	for (const auto& j : d.j)
		if (static_cast<int>(j.rows()) != m || static_cast<int>(j.cols()) != m)
			throw std::invalid_argument("J matrices must be m x m");
	// Norm identity first: it also forces skew-symmetry of every J_Z.
	for (const auto& z : probe_vectors(static_cast<std::size_t>(q), {}))
	{
		QMatrix jz = j_of(d, z);
		Rational zz = dot(z, z);
		for (const auto& x : probe_vectors(static_cast<std::size_t>(m), {}))
		{
			QVec y = column(jz, x);
			if (dot(y, y) != zz * dot(x, x))
				throw std::invalid_argument("not H-type: |J_Z X| != |Z||X| at Z=" + vec_str(z) + ", X=" + vec_str(x));
		}
	}
	std::vector<int> layers(static_cast<std::size_t>(m), 1);
	layers.insert(layers.end(), static_cast<std::size_t>(q), 2);
	std::vector<std::string> names = d.v_names, zn = d.z_names;
	if (names.empty())
		for (int i = 0; i < m; ++i) names.push_back("V" + std::to_string(i + 1));
	if (zn.empty())
		for (int k = 0; k < q; ++k) zn.push_back("Z" + std::to_string(k + 1));
	names.insert(names.end(), zn.begin(), zn.end());
	std::vector<BracketEntry> br;
	for (int i = 0; i < m; ++i)
		for (int jj = i + 1; jj < m; ++jj)
		{
			BracketEntry e{i, jj, {}};
			for (int k = 0; k < q; ++k)
			{
				// <Z_k, [e_i, e_j]> = <J_k e_i, e_j> = (J_k)_{j,i}
				const Rational& c = d.j[static_cast<std::size_t>(k)](static_cast<std::size_t>(jj), static_cast<std::size_t>(i));
				if (sgn(c) != 0) e.terms.push_back({m + k, c});
			}
			if (!e.terms.empty()) br.push_back(std::move(e));
		}
	auto g = std::make_shared<GradedAlgebra>(name, layers, names, br);
	if (!validate_grading(*g).empty()) throw std::invalid_argument("induced bracket is not a graded Lie bracket");
	return g;
}

HTypeData j_from_algebra(const GradedAlgebra& g)
{
	if (g.step() != 2) throw std::invalid_argument("H-type structure needs a step-2 algebra");
	auto v = g.layer_indices(1), z = g.layer_indices(2);
	HTypeData d;
	d.m = static_cast<int>(v.size());
	for (int i : v) d.v_names.push_back(g.basis_names()[static_cast<std::size_t>(i)]);
	for (int k : z) d.z_names.push_back(g.basis_names()[static_cast<std::size_t>(k)]);
	for (std::size_t k = 0; k < z.size(); ++k)
	{
		QMatrix j(v.size(), v.size());
		for (std::size_t a = 0; a < v.size(); ++a)
			for (std::size_t b = 0; b < v.size(); ++b)
				for (const auto& t : g.terms(v[a], v[b]))
					if (t.k == z[k]) j(b, a) = t.c;
		d.j.push_back(std::move(j));
	}
	return d;
}

HTypeCheck check_h_type(const GradedAlgebra& g, const std::vector<QVec>& x_samples, const std::vector<QVec>& z_samples)
{
	HTypeCheck out;
	auto fail = [&](const std::string& s) {
		if (out.ok) out.failure = s;
		out.ok = false;
	};
	if (g.step() != 2)
	{
		fail("not step 2");
		return out;
	}
	HTypeData d = j_from_algebra(g);
	auto v = g.layer_indices(1), zi = g.layer_indices(2);
	std::size_t m = v.size(), q = zi.size();
	auto embed_v = [&](const QVec& x) {
		QVec full(static_cast<std::size_t>(g.dim()));
		for (std::size_t a = 0; a < m; ++a) full[static_cast<std::size_t>(v[a])] = x[a];
		return full;
	};
	auto z_part = [&](const QVec& full) {
		QVec z(q);
		for (std::size_t k = 0; k < q; ++k) z[k] = full[static_cast<std::size_t>(zi[k])];
		return z;
	};
	auto xs = probe_vectors(m, x_samples);
	auto zs = probe_vectors(q, z_samples);
	for (const auto& z : zs)
	{
		QMatrix jz = j_of(d, z);
		Rational zz = dot(z, z);
		for (const auto& x : xs)
		{
			QVec y = column(jz, x);
			if (dot(y, y) != zz * dot(x, x)) fail("|J_Z X| != |Z||X| at Z=" + vec_str(z) + ", X=" + vec_str(x));
			QVec br = z_part(g.bracket(embed_v(x), embed_v(y)));
			if (!(br == scale(dot(x, x), z))) fail("[X, J_Z X] != |X|^2 Z at Z=" + vec_str(z) + ", X=" + vec_str(x));
		}
		for (const auto& w : zs)
		{
			QMatrix jw = j_of(d, w);
			QMatrix lhs = jz * jw + jw * jz;
			QMatrix rhs = QMatrix::identity(m);
			Rational c = -2 * dot(z, w);
			for (std::size_t a = 0; a < m; ++a) rhs(a, a) = c;
			if (!(lhs == rhs)) fail("J_Z J_W + J_W J_Z != -2<Z,W> Id at Z=" + vec_str(z) + ", W=" + vec_str(w));
		}
	}
	return out;
}

QMatrix HeisenbergMatrixModel::lie_matrix(const QVec& x) const
{
	QMatrix a(static_cast<std::size_t>(size()), static_cast<std::size_t>(size()));
	std::size_t last = static_cast<std::size_t>(n_) + 1;
	for (int i = 0; i < n_; ++i)
	{
		a(0, static_cast<std::size_t>(i) + 1) = x[static_cast<std::size_t>(2 * i)];
		a(static_cast<std::size_t>(i) + 1, last) = x[static_cast<std::size_t>(2 * i + 1)];
	}
	a(0, last) = x[static_cast<std::size_t>(2 * n_)];
	return a;
}

QVec HeisenbergMatrixModel::from_lie_matrix(const QMatrix& a) const
{
	QVec x(static_cast<std::size_t>(2 * n_ + 1));
	std::size_t last = static_cast<std::size_t>(n_) + 1;
	for (int i = 0; i < n_; ++i)
	{
		x[static_cast<std::size_t>(2 * i)] = a(0, static_cast<std::size_t>(i) + 1);
		x[static_cast<std::size_t>(2 * i + 1)] = a(static_cast<std::size_t>(i) + 1, last);
	}
	x[static_cast<std::size_t>(2 * n_)] = a(0, last);
	return x;
}

QMatrix HeisenbergMatrixModel::exp(const QVec& x) const
{
	QMatrix a = lie_matrix(x);
	QMatrix a2 = a * a;
	QMatrix r = QMatrix::identity(static_cast<std::size_t>(size())) + a;
	for (std::size_t i = 0; i < r.rows(); ++i)
		for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) += a2(i, j) / 2;
	return r;
}

QVec HeisenbergMatrixModel::log(const QMatrix& m) const
{
	QMatrix n = m - QMatrix::identity(static_cast<std::size_t>(size()));
	QMatrix n2 = n * n;
	for (std::size_t i = 0; i < n.rows(); ++i)
		for (std::size_t j = 0; j < n.cols(); ++j) n(i, j) -= n2(i, j) / 2;
	return from_lie_matrix(n);
}

QVec HeisenbergMatrixModel::product(const QVec& x, const QVec& y) const { return log(exp(x) * exp(y)); }

std::vector<std::string> catalog_names()
{
	return {"h1", "h2", "h3", "h4", "h2_1", "g42", "free_2_2", "free_2_3", "free_3_2", "r1", "r2", "r3"};
}

AlgebraPtr catalog_by_name(const std::string& name)
{
	std::smatch m;
	if (name == "h2_1") return complexified_heisenberg();
	if (name == "g42") return example_g42();
	if (std::regex_match(name, m, std::regex("h([0-9]+)"))) return heisenberg(std::stoi(m[1]));
	if (std::regex_match(name, m, std::regex("r([0-9]+)"))) return abelian(std::stoi(m[1]));
	if (std::regex_match(name, m, std::regex("free_([0-9]+)_([0-9]+)")))
		return free_nilpotent(std::stoi(m[1]), std::stoi(m[2]));
	throw std::invalid_argument("unknown catalog group '" + name + "'");
}

} // namespace carnot
