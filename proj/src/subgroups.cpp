#include "carnot/subgroups.hpp"

#include "carnot/bch.hpp"
#include "carnot/catalog.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace carnot {

namespace {

std::size_t amb(const GradedAlgebra& g) { return static_cast<std::size_t>(g.dim()); }

std::string vec_str(const GradedAlgebra& g, const QVec& v)
{
	std::string s;
	for (int i = 0; i < g.dim(); ++i)
	{
		const Rational& c = v[static_cast<std::size_t>(i)];
		if (sgn(c) == 0) continue;
		if (!s.empty()) s += sgn(c) > 0 ? " + " : " - ";
		else if (sgn(c) < 0) s += "-";
		Rational a = abs(c);
		if (a != 1) s += a.get_str() + "*";
		s += g.basis_names()[static_cast<std::size_t>(i)];
	}
	return s.empty() ? "0" : s;
}

std::vector<QVec> layer_standard_basis(const GradedAlgebra& g, int l)
{
	std::vector<QVec> e;
	for (int i : g.layer_indices(l)) e.push_back(g.basis_vector(i));
	return e;
}

std::vector<Subspace> split_layers(const GradedAlgebra& g, const std::vector<QVec>& homogeneous)
{
	std::vector<std::vector<QVec>> per(static_cast<std::size_t>(g.step()));
	for (const auto& v : homogeneous)
		for (int l = 1; l <= g.step(); ++l)
		{
			QVec p = project_layer(g, v, l);
			if (!is_zero_vector(p)) per[static_cast<std::size_t>(l - 1)].push_back(std::move(p));
		}
	std::vector<Subspace> out;
	for (auto& vs : per) out.push_back(Subspace::span(amb(g), vs));
	return out;
}

// Restriction to and from first-layer coordinates.
struct LayerCoords
{
	std::vector<int> idx;
	std::size_t n;
	QVec restrict(const QVec& v) const
	{
		QVec r(idx.size());
		for (std::size_t a = 0; a < idx.size(); ++a) r[a] = v[static_cast<std::size_t>(idx[a])];
		return r;
	}
	QVec embed(const QVec& r) const
	{
		QVec v(n);
		for (std::size_t a = 0; a < idx.size(); ++a) v[static_cast<std::size_t>(idx[a])] = r[a];
		return v;
	}
};

LayerCoords layer_coords(const GradedAlgebra& g, int l) { return {g.layer_indices(l), amb(g)}; }

Rational small_rational(std::mt19937_64& rng)
{
	static const Rational grid[] = {0, 1, -1, 2, -2, Rational(1, 2), Rational(-1, 2), 3, -3};
	std::uniform_int_distribution<int> d(0, 8);
	return grid[d(rng)];
}

bool same_structure(const GradedAlgebra& a, const GradedAlgebra& b)
{
	if (a.layers() != b.layers()) return false;
	auto ca = a.canonical_brackets(), cb = b.canonical_brackets();
	if (ca.size() != cb.size()) return false;
	for (std::size_t e = 0; e < ca.size(); ++e)
	{
		if (ca[e].i != cb[e].i || ca[e].j != cb[e].j || ca[e].terms.size() != cb[e].terms.size()) return false;
		for (std::size_t t = 0; t < ca[e].terms.size(); ++t)
			if (ca[e].terms[t].k != cb[e].terms[t].k || ca[e].terms[t].c != cb[e].terms[t].c) return false;
	}
	return true;
}

} // namespace

// ---- subalgebras ----

HomogeneousSubalgebra::HomogeneousSubalgebra(AlgebraPtr g, std::vector<Subspace> layers)
    : g_(std::move(g)), layers_(std::move(layers))
{
	if (static_cast<int>(layers_.size()) != g_->step()) throw std::invalid_argument("one subspace per layer expected");
	for (int l = 1; l <= g_->step(); ++l)
		for (const auto& v : layer(l).basis())
			if (!(project_layer(*g_, v, l) == v)) throw std::invalid_argument("layer basis vector leaves its layer");
}

int HomogeneousSubalgebra::dim() const
{
	int d = 0;
	for (const auto& s : layers_) d += static_cast<int>(s.dim());
	return d;
}

std::vector<QVec> HomogeneousSubalgebra::basis() const
{
	std::vector<QVec> b;
	for (const auto& s : layers_) b.insert(b.end(), s.basis().begin(), s.basis().end());
	return b;
}

Subspace HomogeneousSubalgebra::space() const { return Subspace::span(amb(*g_), basis()); }

bool HomogeneousSubalgebra::contains(const QVec& v) const
{
	for (int l = 1; l <= g_->step(); ++l)
		if (!layer(l).contains(project_layer(*g_, v, l))) return false;
	return true;
}

HomogeneousSubalgebra layered_decomposition(AlgebraPtr g, const std::vector<QVec>& span)
{
	for (const auto& v : span)
		if (static_cast<int>(v.size()) != g->dim()) throw std::invalid_argument("vector length does not match algebra");
	Subspace s = Subspace::span(amb(*g), span);
	for (const auto& b : s.basis())
		for (int l = 1; l <= g->step(); ++l)
		{
			QVec p = project_layer(*g, b, l);
			if (!s.contains(p))
				throw SubgroupError(SubgroupError::Kind::not_homogeneous,
				                    "span is not homogeneous: layer-" + std::to_string(l) + " projection " +
				                        vec_str(*g, p) + " of " + vec_str(*g, b) + " escapes",
				                    p);
		}
	for (std::size_t a = 0; a < s.dim(); ++a)
		for (std::size_t b = a + 1; b < s.dim(); ++b)
		{
			QVec br = g->bracket(s.basis()[a], s.basis()[b]);
			if (!s.contains(br))
				throw SubgroupError(SubgroupError::Kind::not_subalgebra,
				                    "span is not a subalgebra: [" + vec_str(*g, s.basis()[a]) + ", " +
				                        vec_str(*g, s.basis()[b]) + "] = " + vec_str(*g, br) + " escapes",
				                    br);
		}
	return HomogeneousSubalgebra(g, split_layers(*g, s.basis()));
}

HomogeneousSubalgebra generated_subalgebra(AlgebraPtr g, const std::vector<QVec>& vectors)
{
	std::vector<Subspace> layers = split_layers(*g, vectors);
	bool grew = true;
	while (grew)
	{
		grew = false;
		for (int i = 1; i <= g->step(); ++i)
			for (int j = i; i + j <= g->step(); ++j)
			{
				std::vector<QVec> add;
				for (const auto& u : layers[static_cast<std::size_t>(i - 1)].basis())
					for (const auto& v : layers[static_cast<std::size_t>(j - 1)].basis())
					{
						QVec br = g->bracket(u, v);
						if (!is_zero_vector(br) && !layers[static_cast<std::size_t>(i + j - 1)].contains(br))
							add.push_back(std::move(br));
					}
				if (add.empty()) continue;
				Subspace& t = layers[static_cast<std::size_t>(i + j - 1)];
				t = t.sum(Subspace::span(amb(*g), add));
				grew = true;
			}
	}
	return HomogeneousSubalgebra(g, layers);
}

HomogeneousSubalgebra whole_algebra(AlgebraPtr g)
{
	std::vector<Subspace> layers;
	for (int l = 1; l <= g->step(); ++l) layers.push_back(layer_space(*g, l));
	return HomogeneousSubalgebra(g, layers);
}

HomogeneousSubalgebra zero_subalgebra(AlgebraPtr g)
{
	return HomogeneousSubalgebra(g, std::vector<Subspace>(static_cast<std::size_t>(g->step()), Subspace(amb(*g))));
}

bool is_ideal(const HomogeneousSubalgebra& a)
{
	const GradedAlgebra& g = a.algebra();
	for (int i = 0; i < g.dim(); ++i)
		for (const auto& v : a.basis())
			if (!a.contains(g.bracket(g.basis_vector(i), v))) return false;
	return true;
}

bool is_commutative(const HomogeneousSubalgebra& a)
{
	auto b = a.basis();
	for (std::size_t i = 0; i < b.size(); ++i)
		for (std::size_t j = i + 1; j < b.size(); ++j)
			if (!is_zero_vector(a.algebra().bracket(b[i], b[j]))) return false;
	return true;
}

bool is_complementary(const HomogeneousSubalgebra& a, const HomogeneousSubalgebra& b)
{
	const GradedAlgebra& g = a.algebra();
	if (g.dim() != b.algebra().dim() || g.step() != b.algebra().step()) return false;
	for (int l = 1; l <= g.step(); ++l)
	{
		if (a.layer_dim(l) + b.layer_dim(l) != g.layer_dim(l)) return false;
		if (static_cast<int>(a.layer(l).sum(b.layer(l)).dim()) != g.layer_dim(l)) return false;
	}
	return true;
}

int homogeneous_dimension(const HomogeneousSubalgebra& a)
{
	int q = 0;
	for (int l = 1; l <= a.algebra().step(); ++l) q += l * a.layer_dim(l);
	return q;
}

bool check_qkp(const HomogeneousSubalgebra& a, const HomogeneousSubalgebra& b)
{
	return homogeneous_dimension(a) + homogeneous_dimension(b) == homogeneous_dimension(a.algebra());
}

// ---- morphisms ----

GradedMorphism::GradedMorphism(AlgebraPtr domain, AlgebraPtr codomain, QMatrix matrix)
    : dom_(std::move(domain)), cod_(std::move(codomain)), m_(std::move(matrix))
{
	if (static_cast<int>(m_.rows()) != cod_->dim() || static_cast<int>(m_.cols()) != dom_->dim())
		throw std::invalid_argument("morphism matrix must be " + std::to_string(cod_->dim()) + "x" +
		                            std::to_string(dom_->dim()));
	HomReport r = check_h_homomorphism(*this);
	lie_ = r.is_lie_hom;
	layered_ = r.is_layer_preserving;
	surj_ = r.is_surjective;
	inj_ = r.is_injective;
}

RVec GradedMorphism::apply(const RVec& x) const
{
	RVec y(m_.rows(), 0.0);
	for (std::size_t i = 0; i < m_.rows(); ++i)
		for (std::size_t j = 0; j < m_.cols(); ++j)
			if (sgn(m_(i, j)) != 0) y[i] += m_(i, j).get_d() * x[j];
	return y;
}

HomReport check_h_homomorphism(const GradedMorphism& l)
{
	const GradedAlgebra &d = l.domain(), &c = l.codomain();
	const QMatrix& m = l.matrix();
	HomReport r{true, true, false, false, false, {}};
	for (std::size_t i = 0; i < m.rows(); ++i)
		for (std::size_t j = 0; j < m.cols(); ++j)
			if (sgn(m(i, j)) != 0 && c.layer_of(static_cast<int>(i)) != d.layer_of(static_cast<int>(j)))
			{
				if (r.is_layer_preserving || r.failures.size() < 5)
					r.failures.push_back("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
					                     ") maps layer " + std::to_string(d.layer_of(static_cast<int>(j))) + " to layer " +
					                     std::to_string(c.layer_of(static_cast<int>(i))));
				r.is_layer_preserving = false;
			}
	for (int i = 0; i < d.dim(); ++i)
		for (int j = i + 1; j < d.dim(); ++j)
		{
			QVec lhs = m.apply(d.bracket(d.basis_vector(i), d.basis_vector(j)));
			QVec rhs = c.bracket(m.apply(d.basis_vector(i)), m.apply(d.basis_vector(j)));
			if (!(lhs == rhs))
			{
				if (r.failures.size() < 10)
					r.failures.push_back("L[b" + std::to_string(i + 1) + ",b" + std::to_string(j + 1) +
					                     "] != [Lb" + std::to_string(i + 1) + ",Lb" + std::to_string(j + 1) + "]");
				r.is_lie_hom = false;
			}
		}
	std::size_t rk = rank(m);
	r.is_surjective = static_cast<int>(rk) == c.dim();
	r.is_injective = static_cast<int>(rk) == d.dim();
	r.is_h_homomorphism = r.is_lie_hom && r.is_layer_preserving;
	return r;
}

HomogeneousSubalgebra kernel(const GradedMorphism& l)
{
	if (!l.is_layer_preserving()) throw std::invalid_argument("kernel: map is not layer preserving");
	return layered_decomposition(l.domain_ptr(), nullspace(l.matrix()));
}

HomogeneousSubalgebra image(const GradedMorphism& l)
{
	if (!l.is_h_homomorphism()) throw std::invalid_argument("image: map is not an h-homomorphism");
	std::vector<QVec> cols;
	for (std::size_t j = 0; j < l.matrix().cols(); ++j) cols.push_back(l.matrix().col(j));
	return layered_decomposition(l.codomain_ptr(), cols);
}

Quotient quotient(const HomogeneousSubalgebra& ideal)
{
	AlgebraPtr gp = ideal.algebra_ptr();
	const GradedAlgebra& g = *gp;
	if (!is_ideal(ideal)) throw SubgroupError(SubgroupError::Kind::not_ideal, "quotient: subalgebra is not an ideal");
	std::vector<QVec> reps, full = ideal.basis();
	std::vector<int> layers;
	std::vector<std::string> names;
	for (int l = 1; l <= g.step(); ++l)
		for (const auto& e : extend_basis(ideal.layer(l), layer_standard_basis(g, l)))
		{
			reps.push_back(e);
			layers.push_back(l);
			for (int i = 0; i < g.dim(); ++i)
				if (sgn(e[static_cast<std::size_t>(i)]) != 0) names.push_back(g.basis_names()[static_cast<std::size_t>(i)]);
		}
	std::size_t q = reps.size(), nk = full.size();
	if (q == 0) throw std::invalid_argument("quotient by the whole algebra is trivial");
	full.insert(full.end(), reps.begin(), reps.end());
	QMatrix inv = *inverse(QMatrix::from_columns(full, amb(g)));
	QMatrix proj(q, amb(g));
	for (std::size_t a = 0; a < q; ++a)
		for (std::size_t j = 0; j < amb(g); ++j) proj(a, j) = inv(nk + a, j);
	std::vector<BracketEntry> br;
	for (std::size_t a = 0; a < q; ++a)
		for (std::size_t b = a + 1; b < q; ++b)
		{
			QVec v = proj.apply(g.bracket(reps[a], reps[b]));
			BracketEntry e{static_cast<int>(a), static_cast<int>(b), {}};
			for (std::size_t k = 0; k < q; ++k)
				if (sgn(v[k]) != 0) e.terms.push_back({static_cast<int>(k), v[k]});
			if (!e.terms.empty()) br.push_back(std::move(e));
		}
	auto qa = std::make_shared<GradedAlgebra>(g.name() + "_quotient", layers, names, br);
	// A quotient of a stratified algebra may drop top layers entirely.
	return {qa, GradedMorphism(gp, qa, proj), reps};
}

std::string to_string(EpiVerdict v)
{
	switch (v)
	{
	case EpiVerdict::h_epimorphism: return "h_epimorphism";
	case EpiVerdict::surjective_not_epi: return "surjective_not_epi";
	case EpiVerdict::not_surjective: return "not_surjective";
	case EpiVerdict::undecided: return "undecided";
	}
	return "?";
}

std::string to_string(MonoVerdict v)
{
	switch (v)
	{
	case MonoVerdict::h_monomorphism: return "h_monomorphism";
	case MonoVerdict::injective_not_mono: return "injective_not_mono";
	case MonoVerdict::not_injective: return "not_injective";
	case MonoVerdict::undecided: return "undecided";
	}
	return "?";
}

std::string to_string(HVClass c)
{
	switch (c)
	{
	case HVClass::horizontal: return "horizontal";
	case HVClass::vertical: return "vertical";
	case HVClass::neither: return "neither";
	}
	return "?";
}

GradedMorphism right_inverse(const GradedMorphism& l, const HomogeneousSubalgebra& h)
{
	// Columns: l restricted to a basis of h is invertible onto the codomain.
	std::vector<QVec> hb = h.basis(), images;
	for (const auto& v : hb) images.push_back(l.apply(v));
	std::size_t m = static_cast<std::size_t>(l.codomain().dim());
	auto inv = inverse(QMatrix::from_columns(images, m));
	if (hb.size() != m || !inv) throw std::invalid_argument("right_inverse: l restricted to h is not invertible");
	QMatrix r = QMatrix::from_columns(hb, amb(l.domain())) * *inv;
	return GradedMorphism(l.codomain_ptr(), l.domain_ptr(), r);
}

// ---- H-type constructions ----

namespace {

struct SymplecticForm
{
	QMatrix j; // acts on first-layer coordinates
	Rational omega(const QVec& x, const QVec& y) const { return dot(j.apply(x), y); }
	Subspace image(const Subspace& s) const
	{
		std::vector<QVec> v;
		for (const auto& b : s.basis()) v.push_back(j.apply(b));
		return Subspace::span(s.ambient(), v);
	}
};

// (e_i, J e_i) pairs of a J-invariant subspace, mutually orthogonal.
std::vector<QVec> j_pairs(const SymplecticForm& f, Subspace rem)
{
	std::vector<QVec> es;
	while (rem.dim() > 0)
	{
		QVec e = rem.basis()[0];
		QVec je = f.j.apply(e);
		if (!rem.contains(je)) throw std::logic_error("subspace is not J-invariant");
		es.push_back(e);
		rem = rem.intersect(Subspace::span(rem.ambient(), {e, je}).orthogonal());
	}
	return es;
}

// Symplectic basis (p_a, q_a) with omega(p_a, q_b) = delta_ab of a symplectic subspace.
std::pair<std::vector<QVec>, std::vector<QVec>> symplectic_basis(const SymplecticForm& f, Subspace rem)
{
	std::vector<QVec> ps, qs;
	while (rem.dim() > 0)
	{
		QVec p = rem.basis()[0];
		std::optional<QVec> q;
		for (const auto& w : rem.basis())
		{
			Rational o = f.omega(p, w);
			if (sgn(o) != 0)
			{
				q = scale(Rational(1 / o), w);
				break;
			}
		}
		if (!q) throw std::logic_error("degenerate symplectic subspace");
		ps.push_back(p);
		qs.push_back(*q);
		rem = rem.intersect(Subspace::span(rem.ambient(), {f.j.apply(p), f.j.apply(*q)}).orthogonal());
	}
	return {ps, qs};
}

bool pairwise_commuting(const GradedAlgebra& g, const std::vector<QVec>& vs)
{
	for (std::size_t a = 0; a < vs.size(); ++a)
		for (std::size_t b = a + 1; b < vs.size(); ++b)
			if (!is_zero_vector(g.bracket(vs[a], vs[b]))) return false;
	return true;
}

HomogeneousSubalgebra horizontal_subalgebra(AlgebraPtr g, const std::vector<QVec>& vs)
{
	std::vector<Subspace> layers(static_cast<std::size_t>(g->step()), Subspace(amb(*g)));
	layers[0] = Subspace::span(amb(*g), vs);
	return HomogeneousSubalgebra(g, layers);
}

void require(bool ok, const std::string& what)
{
	if (!ok) throw SubgroupError(SubgroupError::Kind::hypothesis, what);
}

} // namespace

HomogeneousSubalgebra heisenberg_complement(AlgebraPtr gp, const Subspace& n1, std::uint64_t seed)
{
	const GradedAlgebra& g = *gp;
	require(g.step() == 2 && g.layer_dim(2) == 1, "heisenberg_complement needs a step-2 algebra with 1-dim center");
	require(check_h_type(g).ok, "heisenberg_complement needs an H-type bracket in the given basis");
	require(n1.ambient() == amb(g) && layer_space(g, 1).contains(n1), "n1 must lie in the first layer");
	LayerCoords lc = layer_coords(g, 1);
	std::size_t m = lc.idx.size(), n = m / 2, p = n1.dim();
	require(p >= n && p < m, "need 1 <= k <= n, k = codim of n1 in the first layer");

	SymplecticForm f{j_from_algebra(g).j[0]};
	std::vector<QVec> nb;
	for (const auto& v : n1.basis()) nb.push_back(lc.restrict(v));
	Subspace N = Subspace::span(m, nb);
	Subspace W = N.intersect(f.image(N));
	std::vector<QVec> es = j_pairs(f, W);
	Subspace U = N.intersect(W.orthogonal());
	Subspace JU = f.image(U);
	Subspace R = W.sum(U).sum(JU).orthogonal();
	std::vector<QVec> ws = j_pairs(f, R);
	std::size_t l = es.size(), r = ws.size();
	if (r > l) throw std::logic_error("heisenberg_complement: more free pairs than kernel pairs");

	// Isotropic complement of U inside U + JU: JU itself when U is isotropic,
	// otherwise a Lagrangian graph p + S q with symmetric S.
	std::vector<QVec> lag;
	bool isotropic = true;
	for (std::size_t a = 0; a < U.dim() && isotropic; ++a)
		for (std::size_t b = a + 1; b < U.dim(); ++b)
			if (sgn(f.omega(U.basis()[a], U.basis()[b])) != 0) isotropic = false;
	if (isotropic)
		lag = JU.basis();
	else
	{
		auto [ps, qs] = symplectic_basis(f, U.sum(JU));
		std::size_t qn = ps.size();
		std::mt19937_64 rng(seed);
		for (int trial = 0; trial < 5000 && lag.empty(); ++trial)
		{
			std::vector<std::vector<Rational>> s(qn, std::vector<Rational>(qn));
			if (trial > 0)
				for (std::size_t a = 0; a < qn; ++a)
					for (std::size_t b = a; b < qn; ++b) s[a][b] = s[b][a] = small_rational(rng);
			std::vector<QVec> cand;
			for (std::size_t a = 0; a < qn; ++a)
			{
				QVec v = ps[a];
				for (std::size_t b = 0; b < qn; ++b)
					if (sgn(s[a][b]) != 0) axpy(s[a][b], qs[b], v);
				cand.push_back(std::move(v));
			}
			if (Subspace::span(m, cand).intersect(U).dim() == 0) lag = cand;
		}
		if (lag.empty()) throw std::logic_error("heisenberg_complement: no transverse Lagrangian found");
	}

	std::vector<QVec> s = lag;
	for (std::size_t i = 0; i < r; ++i)
	{
		const QVec &w = ws[i], &e = es[i];
		Rational t = dot(w, w) / dot(e, e);
		s.push_back(add(w, e));
		s.push_back(sub(f.j.apply(w), scale(t, f.j.apply(e))));
	}
	std::vector<QVec> full;
	for (const auto& v : s) full.push_back(lc.embed(v));
	if (full.size() != m - p || !pairwise_commuting(g, full) || Subspace::span(m, s).sum(N).dim() != m)
		throw std::logic_error("heisenberg_complement: construction failed its exact check");
	return horizontal_subalgebra(gp, full);
}

HomogeneousSubalgebra h21_complement(AlgebraPtr gp, const Subspace& n1)
{
	const GradedAlgebra& g = *gp;
	require(g.step() == 2 && g.layer_dim(1) == 4 && g.layer_dim(2) == 2,
	        "h21_complement needs the complexified Heisenberg algebra");
	require(check_h_type(g).ok, "h21_complement needs an H-type bracket in the given basis");
	require(n1.ambient() == amb(g) && layer_space(g, 1).contains(n1) && n1.dim() == 2,
	        "n1 must be a 2-dim subspace of the first layer");
	LayerCoords lc = layer_coords(g, 1), zc = layer_coords(g, 2);
	HTypeData d = j_from_algebra(g);
	const QMatrix &j1 = d.j[0], &j2 = d.j[1];
	QVec x = lc.restrict(n1.basis()[0]), y = lc.restrict(n1.basis()[1]);
	QVec z = zc.restrict(g.bracket(n1.basis()[0], n1.basis()[1]));
	Subspace N = Subspace::span(4, {x, y});
	auto accept = [&](const std::vector<QVec>& h) {
		std::vector<QVec> full{lc.embed(h[0]), lc.embed(h[1])};
		return pairwise_commuting(g, full) && Subspace::span(4, h).sum(N).dim() == 4;
	};
	if (is_zero_vector(z))
	{
		std::vector<QVec> h{j1.apply(x), j2.apply(x)};
		if (!accept(h)) throw std::logic_error("h21_complement: commutative case failed its exact check");
		return horizontal_subalgebra(gp, {lc.embed(h[0]), lc.embed(h[1])});
	}
	// T1 = Z/|Z|, T2 its rotation; J scales linearly, so work with unnormalized Z.
	QMatrix jz(4, 4), jp(4, 4);
	for (std::size_t a = 0; a < 4; ++a)
		for (std::size_t b = 0; b < 4; ++b)
		{
			jz(a, b) = z[0] * j1(a, b) + z[1] * j2(a, b);
			jp(a, b) = -z[1] * j1(a, b) + z[0] * j2(a, b);
		}
	Rational zz = dot(z, z);
	QVec jzx = jz.apply(x), jpx = jp.apply(x), jzjpx = scale(Rational(1 / zz), jz.apply(jpx));
	for (Rational mu : {Rational(1), Rational(2), Rational(3), Rational(-1), Rational(-2), Rational(1, 2),
	                    Rational(-1, 2), Rational(5), Rational(-5)})
	{
		std::vector<QVec> h{sub(x, scale(mu, jpx)), add(scale(mu, jzx), jzjpx)};
		if (accept(h)) return horizontal_subalgebra(gp, {lc.embed(h[0]), lc.embed(h[1])});
	}
	throw std::logic_error("h21_complement: no admissible lambda found");
}

HVClass horizontal_vertical_classify(const HomogeneousSubalgebra& a)
{
	const GradedAlgebra& g = a.algebra();
	if (g.step() != 2) throw std::invalid_argument("horizontal/vertical classification needs a step-2 algebra");
	if (a.layer_dim(2) == 0) return HVClass::horizontal;
	if (a.layer_dim(2) == g.layer_dim(2)) return HVClass::vertical;
	return HVClass::neither;
}

CommutativeDim max_commutative_horizontal_dim(AlgebraPtr gp, const SearchOptions& opt)
{
	const GradedAlgebra& g = *gp;
	LayerCoords lc = layer_coords(g, 1);
	std::size_t m = lc.idx.size();
	CommutativeDim out;
	if (g.step() == 1)
	{
		out = {static_cast<int>(m), true, layer_standard_basis(g, 1), "abelian"};
		return out;
	}
	// Nondegenerate form with 1-dim second layer: Lagrangians have dim m/2.
	if (g.step() == 2 && g.layer_dim(2) == 1)
	{
		SymplecticForm f{j_from_algebra(g).j[0]};
		if (m % 2 == 0 && sgn(determinant(f.j)) != 0)
		{
			auto [ps, qs] = symplectic_basis(f, Subspace::whole(m));
			for (const auto& v : ps) out.witness.push_back(lc.embed(v));
			out.dim = static_cast<int>(ps.size());
			out.exact = true;
			out.method = "symplectic: isotropic subspaces have dim <= m/2";
			return out;
		}
	}
	if (static_cast<int>(m) > kCommutativeSearchMaxDim)
		throw std::invalid_argument("first layer of dim " + std::to_string(m) + " exceeds the search bound " +
		                            std::to_string(kCommutativeSearchMaxDim));
	// Upper bound from H-type: ad X maps the first layer onto the center.
	int upper = static_cast<int>(m);
	std::string why = "greedy search";
	if (g.step() == 2 && check_h_type(g).ok)
	{
		upper = static_cast<int>(m) - g.layer_dim(2);
		why = "H-type: ad X onto the center bounds the dim by m - dim z";
	}
	// Greedy randomized: extend by vectors commuting with everything chosen so far.
	std::mt19937_64 rng(opt.seed);
	auto commutant = [&](const std::vector<QVec>& chosen) {
		std::vector<QVec> rows;
		for (const auto& c : chosen)
			for (int k : g.layer_indices(2))
			{
				QVec row(m);
				for (std::size_t a = 0; a < m; ++a)
				{
					QVec br = g.bracket(c, g.basis_vector(lc.idx[a]));
					row[a] = br[static_cast<std::size_t>(k)];
				}
				rows.push_back(std::move(row));
			}
		if (rows.empty()) return Subspace::whole(m);
		return Subspace::span(m, nullspace(QMatrix::from_rows(rows, m)));
	};
	std::size_t trials = std::min<std::size_t>(opt.budget, 2000);
	for (std::size_t t = 0; t < trials && out.dim < upper; ++t)
	{
		std::vector<QVec> chosen, local;
		while (true)
		{
			Subspace c = commutant(chosen);
			Subspace cur = Subspace::span(m, local);
			if (cur.contains(c)) break;
			QVec v(m);
			do
			{
				v = QVec(m);
				for (const auto& b : c.basis()) axpy(small_rational(rng), b, v);
			} while (is_zero_vector(v) || cur.contains(v));
			local.push_back(v);
			chosen.push_back(lc.embed(v));
		}
		if (static_cast<int>(chosen.size()) > out.dim)
		{
			out.dim = static_cast<int>(chosen.size());
			out.witness = chosen;
		}
	}
	out.exact = out.dim == upper;
	out.method = out.exact ? why : "best found (budget)";
	return out;
}

// ---- complements ----

namespace {

// Completes a first-layer candidate h1 to a homogeneous subalgebra
// complementary to n, or nullopt if its generated subalgebra meets n.
// Exact for step 2; higher layers are filled with standard basis vectors.
std::optional<HomogeneousSubalgebra> complete_from_h1(const HomogeneousSubalgebra& n, const std::vector<QVec>& h1)
{
	AlgebraPtr gp = n.algebra_ptr();
	const GradedAlgebra& g = *gp;
	std::vector<QVec> gens = h1;
	for (int round = 0; round <= g.step(); ++round)
	{
		HomogeneousSubalgebra s = generated_subalgebra(gp, gens);
		for (int l = 1; l <= g.step(); ++l)
			if (s.layer(l).intersect(n.layer(l)).dim() != 0) return std::nullopt;
		bool extended = false;
		for (int l = 2; l <= g.step(); ++l)
		{
			Subspace both = s.layer(l).sum(n.layer(l));
			if (static_cast<int>(both.dim()) == g.layer_dim(l)) continue;
			for (auto& e : extend_basis(both, layer_standard_basis(g, l))) gens.push_back(std::move(e));
			extended = true;
			break;
		}
		if (!extended) return is_complementary(s, n) ? std::optional<HomogeneousSubalgebra>(s) : std::nullopt;
	}
	return std::nullopt;
}

using Monomial = std::vector<int>; // sorted variable indices, degree <= 2
using VecPoly = std::map<Monomial, QVec>;

void poly_add(VecPoly& p, Monomial mono, const Rational& c, const QVec& v)
{
	std::sort(mono.begin(), mono.end());
	auto it = p.find(mono);
	if (it == p.end()) it = p.emplace(mono, QVec(v.size())).first;
	axpy(c, v, it->second);
}

// Step 2: a combination sum lambda_ab [h_a, h_b] whose part outside n_2
// vanishes identically while one n_2 coordinate is constantly 1 shows that
// every candidate h1 = {c_a + phi(c_a)} has [h1, h1] meeting n_2.
std::optional<std::string> step2_certificate(const HomogeneousSubalgebra& n, const std::vector<QVec>& c)
{
	const GradedAlgebra& g = n.algebra();
	std::size_t k = c.size();
	std::vector<QVec> nb = n.layer(1).basis();
	std::size_t p = nb.size(), dim = amb(g);
	if (k < 2) return std::nullopt;
	std::vector<std::pair<std::size_t, std::size_t>> pairs;
	std::vector<VecPoly> polys;
	for (std::size_t a = 0; a < k; ++a)
		for (std::size_t b = a + 1; b < k; ++b)
		{
			VecPoly poly;
			poly_add(poly, {}, 1, g.bracket(c[a], c[b]));
			for (std::size_t r = 0; r < p; ++r)
			{
				poly_add(poly, {static_cast<int>(b * p + r)}, 1, g.bracket(c[a], nb[r]));
				poly_add(poly, {static_cast<int>(a * p + r)}, 1, g.bracket(nb[r], c[b]));
				for (std::size_t s = 0; s < p; ++s)
					poly_add(poly, {static_cast<int>(a * p + r), static_cast<int>(b * p + s)}, 1, g.bracket(nb[r], nb[s]));
			}
			pairs.push_back({a, b});
			polys.push_back(std::move(poly));
		}
	std::set<Monomial> monos;
	for (const auto& poly : polys)
		for (const auto& [mono, v] : poly) monos.insert(mono);
	// functionals vanishing on n_2 (restricted to layer 2)
	std::vector<QVec> span_n2 = n.layer(2).basis();
	for (int l = 1; l <= g.step(); ++l)
		if (l != 2)
			for (int i : g.layer_indices(l)) span_n2.push_back(g.basis_vector(i));
	std::vector<QVec> outside = Subspace::span(dim, span_n2).orthogonal().basis();
	const auto& n2 = n.layer(2);
	for (std::size_t j = 0; j < n2.dim(); ++j)
	{
		std::size_t piv = n2.pivots()[j];
		std::vector<QVec> rows;
		QVec rhs;
		for (const auto& mono : monos)
		{
			for (const auto& f : outside)
			{
				QVec row(polys.size());
				for (std::size_t e = 0; e < polys.size(); ++e)
				{
					auto it = polys[e].find(mono);
					if (it != polys[e].end()) row[e] = dot(f, it->second);
				}
				rows.push_back(row);
				rhs.push_back(0);
			}
			QVec row(polys.size());
			for (std::size_t e = 0; e < polys.size(); ++e)
			{
				auto it = polys[e].find(mono);
				if (it != polys[e].end()) row[e] = it->second[piv];
			}
			rows.push_back(row);
			rhs.push_back(mono.empty() ? 1 : 0);
		}
		auto lambda = solve(QMatrix::from_rows(rows, polys.size()), rhs);
		if (!lambda) continue;
		std::string s = "for every first-layer complement h1 = span{c_a + phi(c_a)}, the combination";
		for (std::size_t e = 0; e < polys.size(); ++e)
			if (sgn((*lambda)[e]) != 0)
				s += " " + (*lambda)[e].get_str() + "*[h" + std::to_string(pairs[e].first + 1) + ",h" +
				     std::to_string(pairs[e].second + 1) + "]";
		s += " is a nonzero element of n_2 (its " + g.basis_names()[piv] + " coordinate is identically 1)";
		return s;
	}
	return std::nullopt;
}

bool is_complexified_heisenberg(const GradedAlgebra& g)
{
	static const AlgebraPtr ref = complexified_heisenberg();
	return same_structure(g, *ref);
}

} // namespace

EpiClassification find_complement(const HomogeneousSubalgebra& n, const SearchOptions& opt)
{
	AlgebraPtr gp = n.algebra_ptr();
	const GradedAlgebra& g = *gp;
	EpiClassification r{EpiVerdict::undecided, n, std::nullopt, "", "", 0};
	auto found = [&](HomogeneousSubalgebra h, const std::string& method) {
		r.verdict = EpiVerdict::h_epimorphism;
		r.witness = std::move(h);
		r.method = method;
		return r;
	};
	auto none = [&](const std::string& cert, const std::string& method) {
		r.verdict = EpiVerdict::surjective_not_epi;
		r.certificate = cert;
		r.method = method;
		return r;
	};

	Subspace v1 = layer_space(g, 1);
	std::vector<QVec> c = complement_in(n.layer(1), v1);
	std::size_t k = c.size(), p = n.layer_dim(1);
	bool n2_full = g.step() == 2 && n.layer_dim(2) == g.layer_dim(2);

	// Tier 1: fixed complement and closed forms.
	if (auto h = complete_from_h1(n, c)) return found(*h, "fixed_complement");
	if (p == 0)
		return none("the first layer of a complement must be all of V1, and the subalgebra it generates meets the kernel",
		            "forced_first_layer");
	if (n2_full && check_h_type(g).ok)
	{
		if (g.layer_dim(2) == 1 && 2 * k <= static_cast<std::size_t>(g.layer_dim(1)))
			if (auto h = complete_from_h1(n, heisenberg_complement(gp, n.layer(1), opt.seed).layer(1).basis()))
				return found(*h, "heisenberg_complement");
		if (p == 2 && is_complexified_heisenberg(g))
			if (auto h = complete_from_h1(n, h21_complement(gp, n.layer(1)).layer(1).basis()))
				return found(*h, "h21_complement");
	}
	if (n2_full && g.layer_dim(1) <= kCommutativeSearchMaxDim)
	{
		CommutativeDim cd = max_commutative_horizontal_dim(gp, opt);
		if (cd.exact && static_cast<int>(k) > cd.dim)
			return none("a complement would be a commutative subspace of V1 of dim " + std::to_string(k) +
			                " but the maximum is " + std::to_string(cd.dim) + " (" + cd.method + ")",
			            "max_commutative_dim");
	}

	// Tier 2: step 2 certificate, then a small exhaustive grid for dim V1 <= 4.
	if (g.step() == 2)
	{
		if (auto cert = step2_certificate(n, c)) return none(*cert, "step2_certificate");
		if (g.layer_dim(1) <= 4)
		{
			static const Rational grid[] = {0, 1, -1, 2, -2, Rational(1, 2), Rational(-1, 2)};
			std::size_t vars = k * p, total = 1;
			for (std::size_t v = 0; v < vars; ++v) total *= 7;
			std::vector<QVec> nb = n.layer(1).basis();
			for (std::size_t code = 0; code < total && r.trials < opt.budget; ++code, ++r.trials)
			{
				std::size_t rest = code;
				std::vector<QVec> h1 = c;
				for (std::size_t a = 0; a < k; ++a)
					for (std::size_t q = 0; q < p; ++q, rest /= 7) axpy(grid[rest % 7], nb[q], h1[a]);
				if (auto h = complete_from_h1(n, h1)) return found(*h, "step2_grid");
			}
		}
	}

	// Tier 3: randomized graphs over the fixed complement.
	std::mt19937_64 rng(opt.seed);
	std::vector<QVec> nb = n.layer(1).basis();
	for (; r.trials < opt.budget; ++r.trials)
	{
		std::vector<QVec> h1 = c;
		for (std::size_t a = 0; a < k; ++a)
			for (std::size_t q = 0; q < p; ++q) axpy(small_rational(rng), nb[q], h1[a]);
		if (auto h = complete_from_h1(n, h1)) return found(*h, "random_search");
	}
	r.verdict = EpiVerdict::undecided;
	r.method = "random_search";
	r.certificate = "budget of " + std::to_string(opt.budget) + " trials exhausted without a complement";
	return r;
}

EpiClassification classify_epimorphism(const GradedMorphism& l, const SearchOptions& opt)
{
	if (!l.is_h_homomorphism()) throw std::invalid_argument("classify_epimorphism: map is not an h-homomorphism");
	HomogeneousSubalgebra n = kernel(l);
	if (!l.is_surjective())
	{
		EpiClassification r{EpiVerdict::not_surjective, n, std::nullopt, "rank below codomain dimension", "rank", 0};
		return r;
	}
	EpiClassification r = find_complement(n, opt);
	if (r.witness)
	{
		// restriction to the witness must be an h-isomorphism
		GradedMorphism s = right_inverse(l, *r.witness);
		if (!(l.matrix() * s.matrix() == QMatrix::identity(static_cast<std::size_t>(l.codomain().dim()))) ||
		    !s.is_h_homomorphism())
			throw std::logic_error("classify_epimorphism: witness failed the h-isomorphism check");
	}
	return r;
}

namespace {

Subspace ideal_closure(const GradedAlgebra& g, const std::vector<QVec>& vs)
{
	Subspace s = Subspace::span(amb(g), vs);
	bool grew = true;
	while (grew)
	{
		grew = false;
		std::vector<QVec> add;
		for (int i = 0; i < g.dim(); ++i)
			for (const auto& v : s.basis())
			{
				QVec br = g.bracket(g.basis_vector(i), v);
				if (!s.contains(br)) add.push_back(std::move(br));
			}
		if (!add.empty())
		{
			auto all = s.basis();
			all.insert(all.end(), add.begin(), add.end());
			s = Subspace::span(amb(g), all);
			grew = true;
		}
	}
	return s;
}

} // namespace

MonoClassification classify_monomorphism(const GradedMorphism& t, const SearchOptions& opt)
{
	if (!t.is_h_homomorphism()) throw std::invalid_argument("classify_monomorphism: map is not an h-homomorphism");
	AlgebraPtr mp = t.codomain_ptr();
	const GradedAlgebra& m = *mp;
	HomogeneousSubalgebra h = image(t);
	MonoClassification r{MonoVerdict::undecided, h, std::nullopt, std::nullopt, "", "", 0};
	if (!t.is_injective())
	{
		r.verdict = MonoVerdict::not_injective;
		r.certificate = "rank below domain dimension";
		return r;
	}
	auto attempt = [&](const std::vector<QVec>& gens) -> bool {
		Subspace cl = ideal_closure(m, gens);
		HomogeneousSubalgebra nn(mp, split_layers(m, cl.basis()));
		if (!is_complementary(nn, h)) return false;
		// projection onto h along nn
		std::vector<QVec> basis = nn.basis(), hb = h.basis();
		basis.insert(basis.end(), hb.begin(), hb.end());
		QMatrix b = QMatrix::from_columns(basis, amb(m));
		QMatrix inv = *inverse(b);
		QMatrix keep(amb(m), amb(m));
		for (std::size_t i = nn.basis().size(); i < amb(m); ++i) keep(i, i) = 1;
		r.normal_complement = nn;
		r.projection = GradedMorphism(mp, mp, b * keep * inv);
		r.verdict = MonoVerdict::h_monomorphism;
		return true;
	};
	std::vector<QVec> std_comp;
	for (int l = 1; l <= m.step(); ++l)
		for (auto& e : extend_basis(h.layer(l), layer_standard_basis(m, l))) std_comp.push_back(std::move(e));
	++r.trials;
	if (attempt(std_comp))
	{
		r.method = "standard_complement";
		return r;
	}
	std::mt19937_64 rng(opt.seed);
	for (; r.trials < opt.budget; ++r.trials)
	{
		std::vector<QVec> gens;
		for (int l = 1; l <= m.step(); ++l)
		{
			auto hl = h.layer(l).basis();
			for (auto e : extend_basis(h.layer(l), layer_standard_basis(m, l)))
			{
				for (const auto& v : hl) axpy(small_rational(rng), v, e);
				gens.push_back(std::move(e));
			}
		}
		if (attempt(gens))
		{
			r.method = "random_search";
			return r;
		}
	}
	r.method = "random_search";
	r.certificate = "budget of " + std::to_string(opt.budget) + " trials exhausted without a normal complement";
	return r;
}

// ---- group-level splitting ----

std::pair<QVec, QVec> split(const HomogeneousSubalgebra& a, const HomogeneousSubalgebra& b, const QVec& x)
{
	if (!is_complementary(a, b)) throw std::invalid_argument("split: subalgebras are not complementary");
	const GradedAlgebra& g = a.algebra();
	QVec p(amb(g)), h(amb(g));
	for (int l = 1; l <= g.step(); ++l)
	{
		// the layer-l part of p o h is p_l + h_l plus terms from lower layers
		QVec rest = project_layer(g, sub(x, group_product(g, p, h)), l);
		std::vector<QVec> cols = a.layer(l).basis();
		cols.insert(cols.end(), b.layer(l).basis().begin(), b.layer(l).basis().end());
		if (cols.empty()) continue;
		auto coef = solve(QMatrix::from_columns(cols, amb(g)), rest);
		if (!coef) throw std::logic_error("split: layer decomposition failed");
		for (std::size_t i = 0; i < cols.size(); ++i) axpy((*coef)[i], cols[i], i < a.layer(l).dim() ? p : h);
	}
	if (!(group_product(g, p, h) == x)) throw std::logic_error("split: recombination mismatch");
	return {p, h};
}

ProductMembership product_set_membership(const GradedAlgebra& g, const std::vector<QVec>& a, const std::vector<QVec>& b,
                                         const RVec& x, std::uint64_t seed, int restarts, double tol, double bound)
{
	std::size_t na = a.size(), nb = b.size(), nv = na + nb, n = amb(g);
	std::vector<RVec> ad, bd;
	for (const auto& v : a) ad.push_back(to_double(v));
	for (const auto& v : b) bd.push_back(to_double(v));
	auto factors = [&](const Eigen::VectorXd& t, RVec& pa, RVec& pb) {
		pa.assign(n, 0.0);
		pb.assign(n, 0.0);
		for (std::size_t i = 0; i < na; ++i) axpy(t[static_cast<long>(i)], ad[i], pa);
		for (std::size_t j = 0; j < nb; ++j) axpy(t[static_cast<long>(na + j)], bd[j], pb);
	};
	auto residual = [&](const Eigen::VectorXd& t) {
		RVec pa, pb;
		factors(t, pa, pb);
		RVec r = sub(group_product(g, pa, pb), x);
		return Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<long>(n)).eval();
	};
	ProductMembership best;
	best.residual = std::numeric_limits<double>::infinity();
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> u(-2, 2);
	for (int s = 0; s < restarts; ++s)
	{
		Eigen::VectorXd t(static_cast<long>(nv));
		if (s == 0)
		{
			// linear part: x ~ sum t_i a_i + sum t_j b_j
			Eigen::MatrixXd m(static_cast<long>(n), static_cast<long>(nv));
			for (std::size_t i = 0; i < nv; ++i)
				for (std::size_t r = 0; r < n; ++r) m(static_cast<long>(r), static_cast<long>(i)) = (i < na ? ad[i] : bd[i - na])[r];
			t = m.completeOrthogonalDecomposition().solve(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(n)));
		}
		else
			for (long i = 0; i < t.size(); ++i) t[i] = u(rng);
		t = t.cwiseMax(-bound).cwiseMin(bound);
		double mu = 1e-3;
		Eigen::VectorXd f = residual(t);
		for (int it = 0; it < 300 && f.norm() > tol * 1e-2; ++it)
		{
			Eigen::MatrixXd jac(static_cast<long>(n), static_cast<long>(nv));
			for (long i = 0; i < t.size(); ++i)
			{
				double h = 1e-7 * std::max(1.0, std::abs(t[i]));
				Eigen::VectorXd tp = t, tm = t;
				tp[i] += h;
				tm[i] -= h;
				jac.col(i) = (residual(tp) - residual(tm)) / (2 * h);
			}
			Eigen::MatrixXd jtj = jac.transpose() * jac;
			Eigen::VectorXd step = (jtj + mu * Eigen::MatrixXd::Identity(t.size(), t.size())).ldlt().solve(-jac.transpose() * f);
			Eigen::VectorXd tn = (t + step).cwiseMax(-bound).cwiseMin(bound);
			Eigen::VectorXd fn = residual(tn);
			if (fn.norm() < f.norm())
			{
				t = tn;
				f = fn;
				mu = std::max(mu * 0.3, 1e-12);
			}
			else
			{
				mu *= 10;
				if (mu > 1e12) break;
			}
		}
		if (f.norm() < best.residual)
		{
			best.residual = f.norm();
			factors(t, best.a, best.b);
		}
	}
	best.member = best.residual <= tol;
	return best;
}

// ---- random complementary pairs ----

std::optional<std::pair<HomogeneousSubalgebra, HomogeneousSubalgebra>> random_complementary_pair(AlgebraPtr gp,
                                                                                                 std::mt19937_64& rng)
{
	const GradedAlgebra& g = *gp;
	if (g.step() != 2) throw std::invalid_argument("random_complementary_pair supports step-2 algebras");
	LayerCoords l1 = layer_coords(g, 1), l2 = layer_coords(g, 2);
	std::size_t m = l1.idx.size(), q = l2.idx.size();
	std::uniform_int_distribution<int> coin(0, 3), small(-2, 2);
	auto random_in = [&](const LayerCoords& lc) {
		QVec v(lc.idx.size());
		for (auto& c : v) c = small(rng);
		return lc.embed(v);
	};
	// vectors of V1 commuting with all of `chosen`
	auto commutant_vec = [&](const std::vector<QVec>& chosen) -> std::optional<QVec> {
		std::vector<QVec> rows;
		for (const auto& c : chosen)
			for (int k : l2.idx)
			{
				QVec row(m);
				for (std::size_t a = 0; a < m; ++a) row[a] = g.bracket(c, g.basis_vector(l1.idx[a]))[static_cast<std::size_t>(k)];
				rows.push_back(row);
			}
		std::vector<QVec> ker = rows.empty() ? Subspace::whole(m).basis() : nullspace(QMatrix::from_rows(rows, m));
		Subspace cur = Subspace::span(m, [&] {
			std::vector<QVec> r;
			for (const auto& c : chosen) r.push_back(l1.restrict(c));
			return r;
		}());
		for (int tries = 0; tries < 10; ++tries)
		{
			QVec v(m);
			for (const auto& b : ker) axpy(Rational(small(rng)), b, v);
			if (!is_zero_vector(v) && !cur.contains(v)) return l1.embed(v);
		}
		return std::nullopt;
	};
	auto build = [&](std::size_t d1, bool commutative) {
		std::vector<QVec> v;
		while (v.size() < d1)
		{
			std::optional<QVec> next;
			if (commutative)
				next = commutant_vec(v);
			else
				next = random_in(l1);
			if (!next) break;
			v.push_back(*next);
		}
		return v;
	};
	std::uniform_int_distribution<std::size_t> dim1(0, m);
	std::size_t da = dim1(rng);
	bool a_comm = coin(rng) == 0, b_comm = coin(rng) < 2;
	std::vector<QVec> a1 = build(da, a_comm);
	// a2: brackets of a1 plus random extra layer-2 vectors
	std::vector<QVec> a_gen = a1;
	int mode = coin(rng);
	if (mode == 0)
		for (int k : l2.idx) a_gen.push_back(g.basis_vector(k));
	else if (mode == 1)
	{
		std::uniform_int_distribution<std::size_t> extra(0, q);
		for (std::size_t e = extra(rng); e > 0; --e) a_gen.push_back(random_in(l2));
	}
	HomogeneousSubalgebra a = generated_subalgebra(gp, a_gen);
	if (static_cast<std::size_t>(a.layer_dim(1)) != da) return std::nullopt;

	// b1: random complement of a1
	std::vector<QVec> b1;
	Subspace acc = a.layer(1);
	if (b_comm)
	{
		for (int tries = 0; tries < 20 && b1.size() < m - da; ++tries)
		{
			auto v = commutant_vec(b1);
			if (!v) break;
			if (acc.contains(*v)) continue;
			acc = acc.sum(Subspace::span(amb(g), {*v}));
			b1.push_back(*v);
		}
	}
	for (int tries = 0; tries < 50 && b1.size() < m - da; ++tries)
	{
		QVec v = random_in(l1);
		if (acc.contains(v)) continue;
		acc = acc.sum(Subspace::span(amb(g), {v}));
		b1.push_back(v);
	}
	if (b1.size() != m - da) return std::nullopt;
	HomogeneousSubalgebra bgen = generated_subalgebra(gp, b1);
	if (bgen.layer(2).intersect(a.layer(2)).dim() != 0) return std::nullopt;
	std::vector<QVec> b_all = b1;
	Subspace b2 = bgen.layer(2);
	for (auto& e : extend_basis(b2.sum(a.layer(2)), layer_standard_basis(g, 2)))
	{
		QVec v = e;
		for (const auto& w : a.layer(2).basis()) axpy(Rational(small(rng)), w, v);
		b_all.push_back(v);
	}
	for (const auto& v : b2.basis()) b_all.push_back(v);
	HomogeneousSubalgebra b = generated_subalgebra(gp, b_all);
	if (!is_complementary(a, b)) return std::nullopt;
	if (coin(rng) < 2) return std::make_pair(a, b);
	return std::make_pair(b, a);
}

} // namespace carnot
