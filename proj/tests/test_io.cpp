#include "carnot/catalog.hpp"
#include "carnot/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

using namespace carnot;

TEST(GroupFile, RoundTripCatalog)
{
	for (const auto& name : catalog_names())
	{
		auto g = catalog_by_name(name);
		std::string text = emit_group(*g);
		GroupFile back = parse_group(text);
		EXPECT_EQ(emit_group(*back.algebra), text) << name;
		EXPECT_EQ(back.algebra->canonical_brackets().size(), g->canonical_brackets().size());
		EXPECT_EQ(back.algebra->layers(), g->layers());
		EXPECT_TRUE(validate_grading(*back.algebra).empty()) << name;
	}
}

TEST(GroupFile, MetricAndFractions)
{
	std::string text = R"({"name": "t", "dim": 3, "step": 2, "layers": [1, 1, 2], "basis_names": ["X", "Y", "Z"],
	  "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "num": 6, "den": -4}]}],
	  "metric": {"kind": "weighted_max", "weights": [1, 0.5]}})";
	GroupFile f = parse_group(text);
	ASSERT_TRUE(f.metric);
	EXPECT_EQ(f.metric->kind, MetricKind::weighted_max);
	EXPECT_EQ(f.algebra->terms(0, 1)[0].c, Rational(-3, 2));
	std::string out = emit_group(*f.algebra, f.metric);
	EXPECT_NE(out.find("\"num\": -3"), std::string::npos);
	EXPECT_NE(out.find("\"den\": 2"), std::string::npos);
	EXPECT_EQ(emit_group(*parse_group(out).algebra, parse_group(out).metric), out);

	std::string big = R"({"name": "b", "dim": 3, "step": 2, "layers": [1, 1, 2],
	  "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "num": "123456789012345678901234567891", "den": 7}]}]})";
	GroupFile fb = parse_group(big);
	EXPECT_EQ(fb.algebra->terms(0, 1)[0].c, Rational(mpz_class("123456789012345678901234567891")) / 7);
	EXPECT_EQ(emit_group(*parse_group(emit_group(*fb.algebra)).algebra), emit_group(*fb.algebra));
}

TEST(GroupFile, SyntaxErrorPosition)
{
	std::string text = "{\n  \"name\": \"h\",\n  \"dim\": 3,,\n}";
	try
	{
		parse_group(text);
		FAIL();
	}
	catch (const ParseError& e)
	{
		EXPECT_EQ(e.line, 3);
		EXPECT_EQ(e.column, 12);
	}
}

TEST(GroupFile, SchemaErrors)
{
	auto bad = [](const std::string& t) { EXPECT_THROW(parse_group(t), ParseError) << t; };
	bad(R"({"name": "h", "dim": 3, "step": 2, "layers": [1, 1], "brackets": []})");
	bad(R"({"name": "h", "dim": 3, "step": 2, "layers": [1, 1, 3], "brackets": []})");
	bad(R"({"name": "h", "dim": 3, "step": 2, "layers": [1, 1, 2], "brackets": [{"i": 2, "j": 1, "terms": []}]})");
	bad(R"({"name": "h", "dim": 3, "step": 2, "layers": [1, 1, 2],
	  "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "num": 1, "den": 0}]}]})");
	bad(R"({"name": "h", "dim": 3, "step": 2, "layers": [1, 1, 2]})");
	bad(R"({"name": "h", "dim": 3, "step": 2, "layers": [1, 1, 2], "brackets": [], "metric": {"kind": "taxicab"}})");
}

TEST(GroupFile, InvalidTablesAreKeptForValidation)
{
	std::string text = R"({"name": "bad", "dim": 3, "step": 1, "layers": [1, 1, 1],
	  "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "num": 1, "den": 1}]}]})";
	auto v = validate_grading(*parse_group(text).algebra);
	ASSERT_EQ(v.size(), 1u);
	EXPECT_EQ(v[0].kind, GradingViolation::Kind::grading);
	EXPECT_EQ(v[0].indices, (std::vector<int>{1, 2, 3}));
}

TEST(GroupFile, CatalogPathEnv)
{
	auto dir = std::filesystem::temp_directory_path() / "carnot_catalog_test";
	std::filesystem::create_directories(dir);
	auto g = heisenberg(1);
	write_file((dir / "myh.json").string(), emit_group(*g));
	setenv("CARNOT_CATALOG_PATH", dir.c_str(), 1);
	EXPECT_EQ(resolve_group("myh").algebra->dim(), 3);
	EXPECT_EQ(resolve_group("h2").algebra->dim(), 5);
	unsetenv("CARNOT_CATALOG_PATH");
	EXPECT_THROW(resolve_group("myh"), std::invalid_argument);
}

TEST(Formats, RationalVectorsAndDoubles)
{
	EXPECT_EQ(parse_rational_vector("1/2,-3,0"), (QVec{Rational(1, 2), Rational(-3), Rational(0)}));
	EXPECT_EQ(format_rational_vector({Rational(1, 2), Rational(-3)}), "1/2,-3");
	EXPECT_THROW(parse_rational_vector("1/0,2"), std::invalid_argument);
	EXPECT_THROW(parse_rational_vector("a,2"), std::invalid_argument);
	for (double x : {0.1, 1.0 / 3, 2.0 / 3e10, -1e-300, 6.02214076e23})
		EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
	EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
	EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Formats, CurveCsvRoundTrip)
{
	auto h = heisenberg(1);
	auto c = horizontal_lift(builtin_control(h, "circle"), {0, 0, 0}, 64);
	auto path = (std::filesystem::temp_directory_path() / "carnot_curve.csv").string();
	write_curve_csv(c, path);
	std::string text = read_file(path);
	EXPECT_EQ(text.substr(0, text.find('\n')), "t,X,Y,Z");

	// a sampled control read back reproduces the built-in lift closely
	auto cpath = (std::filesystem::temp_directory_path() / "carnot_control.csv").string();
	std::string ctl = "t,X,Y,Z\n";
	for (int k = 0; k <= 400; ++k)
	{
		double t = k / 100.0;
		ctl += format_double(t) + "," + format_double(t < 1 ? 1 : t < 2 ? 0 : t < 3 ? -1 : 0) + "," +
		       format_double(t < 1 ? 0 : t < 2 ? 1 : t < 3 ? 0 : -1) + ",0\n";
	}
	write_file(cpath, ctl);
	auto u = read_control_csv(h, cpath);
	EXPECT_EQ(u.a(), 0);
	EXPECT_EQ(u.b(), 4);
	write_file(cpath, "t,X,Y,Z\n0,1,0,1\n1,1,0,1\n");
	EXPECT_THROW(horizontal_lift(read_control_csv(h, cpath), {0, 0, 0}, 4), std::invalid_argument);
	write_file(cpath, "t,X,Y,Z\n0,1,0\n");
	EXPECT_THROW(read_control_csv(h, cpath), ParseError);
}
