#include "carnot/carnot.h"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

struct Out
{
	char* p = nullptr;
	~Out() { carnot_string_free(p); }
	json parsed() const { return json::parse(p); }
};

carnot_group* load(const char* name)
{
	carnot_group* g = nullptr;
	EXPECT_EQ(carnot_group_load(name, &g), CARNOT_OK) << carnot_last_error();
	return g;
}

std::string tmpdir()
{
	auto d = std::filesystem::temp_directory_path() / "carnot_capi_test";
	std::filesystem::create_directories(d);
	return d.string();
}

} // namespace

TEST(CApi, GroupInfoAndEmit)
{
	carnot_group* g = load("h1");
	Out info;
	ASSERT_EQ(carnot_group_info(g, &info.p), CARNOT_OK);
	json j = info.parsed();
	EXPECT_EQ(j["dim"], 3);
	EXPECT_EQ(j["step"], 2);
	EXPECT_EQ(j["homogeneous_dimension"], 4);
	EXPECT_EQ(j["stratified"], true);
	Out text;
	ASSERT_EQ(carnot_group_emit(g, &text.p), CARNOT_OK);
	carnot_group* back = nullptr;
	ASSERT_EQ(carnot_group_parse(text.p, &back), CARNOT_OK);
	Out again;
	ASSERT_EQ(carnot_group_emit(back, &again.p), CARNOT_OK);
	EXPECT_STREQ(text.p, again.p);
	carnot_group_free(back);
	carnot_group_free(g);

	carnot_group* bad = nullptr;
	EXPECT_EQ(carnot_group_parse("{\"name\": 1,", &bad), CARNOT_INVALID);
	EXPECT_NE(std::string(carnot_last_error()).find("line 1"), std::string::npos);
	EXPECT_EQ(carnot_group_load("no_such_group", &bad), CARNOT_INVALID);
	EXPECT_EQ(carnot_group_info(nullptr, nullptr), CARNOT_ERROR);
}

TEST(CApi, Validate)
{
	carnot_group* g = nullptr;
	ASSERT_EQ(carnot_group_parse(R"({"name": "bad", "dim": 3, "step": 1, "layers": [1, 1, 1],
	  "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "num": 1, "den": 1}]}]})",
	                             &g),
	          CARNOT_OK);
	Out rep;
	EXPECT_EQ(carnot_group_validate(g, &rep.p), CARNOT_INVALID);
	EXPECT_EQ(rep.parsed()["violations"][0]["kind"], "grading");
	carnot_group_free(g);
}

TEST(CApi, Algebra)
{
	carnot_group* g = load("h1");
	Out p, t, o, d;
	ASSERT_EQ(carnot_algebra_product(g, "1,0,0", "0,1,0", &p.p), CARNOT_OK);
	EXPECT_EQ(p.parsed()["product"], "1,1,1/2");
	ASSERT_EQ(carnot_algebra_term(g, 2, "1,0,0", "0,1,0", &t.p), CARNOT_OK);
	EXPECT_EQ(t.parsed()["term"], "0,0,1/2");
	ASSERT_EQ(carnot_algebra_oracle(g, 50, 3, &o.p), CARNOT_OK);
	EXPECT_EQ(o.parsed()["mismatches"], 0);
	ASSERT_EQ(carnot_algebra_decompose(3, &d.p), CARNOT_OK);
	EXPECT_FALSE(d.parsed()["terms"].empty());
	Out bad;
	EXPECT_EQ(carnot_algebra_product(g, "1,x,0", "0,1,0", &bad.p), CARNOT_INVALID);
	EXPECT_EQ(carnot_algebra_product(g, "1,0", "0,1,0", &bad.p), CARNOT_INVALID);
	carnot_group_free(g);
}

TEST(CApi, Subgroups)
{
	Out a, b, c, q, m;
	ASSERT_EQ(carnot_subgroups("classify-epi", R"({"domain": "h1", "codomain": "r2", "matrix": [[1,0,0],[0,1,0]]})", 1, &a.p),
	          CARNOT_OK);
	EXPECT_EQ(a.parsed()["verdict"], "surjective_not_epi");
	ASSERT_EQ(carnot_subgroups("classify-epi",
	                           R"({"domain": "g42", "codomain": "r2", "matrix": [[1,0,0,0,0,0,0],[0,1,0,0,0,0,0]]})", 1, &b.p),
	          CARNOT_OK);
	EXPECT_EQ(b.parsed()["verdict"], "h_epimorphism");
	EXPECT_EQ(b.parsed()["witness_basis"].size(), 2u);
	ASSERT_EQ(carnot_subgroups("complement", R"({"group": "h2", "subalgebra": [[1,0,0,0,0],[0,1,1,0,0],[0,0,0,0,1]]})", 1, &c.p),
	          CARNOT_OK);
	EXPECT_EQ(c.parsed()["commutative"], true);
	ASSERT_EQ(carnot_subgroups("quotient", R"({"group": "h2", "ideal": [[0,1,0,0,0],[0,0,0,0,1]]})", 1, &q.p), CARNOT_OK);
	EXPECT_EQ(q.parsed()["abelian"], true);
	EXPECT_EQ(q.parsed()["group"]["dim"], 3);
	ASSERT_EQ(carnot_subgroups("classify-mono", R"({"domain": "r1", "codomain": "h1", "matrix": [[1],[0],[0]]})", 1, &m.p),
	          CARNOT_OK);
	EXPECT_EQ(m.parsed()["verdict"], "h_monomorphism");

	Out e1, e2, e3;
	EXPECT_EQ(carnot_subgroups("classify-epi", R"({"domain": "h1", "codomain": "r2", "matrix": [[1,0,1],[0,1,0]]})", 1, &e1.p),
	          CARNOT_INVALID);
	EXPECT_EQ(carnot_subgroups("complement", R"({"group": "h1", "subalgebra": [[1,0,1]]})", 1, &e2.p), CARNOT_INVALID);
	EXPECT_EQ(carnot_subgroups("nonsense", "{}", 1, &e3.p), CARNOT_INVALID);
}

TEST(CApi, ExperimentAndManifest)
{
	std::string dir = tmpdir();
	Out s;
	ASSERT_EQ(carnot_experiment("lift", R"({"group": "h1", "control": "square", "steps": 400})", dir.c_str(), 1, 1, &s.p),
	          CARNOT_OK)
	    << carnot_last_error();
	json j = s.parsed();
	EXPECT_NEAR(j["delta"][2].get<double>(), 1.0, 1e-8);
	std::string csv = j["outputs"][0];
	Out h1, h2;
	ASSERT_EQ(carnot_hash_file(csv.c_str(), &h1.p), CARNOT_OK);
	Out s2;
	ASSERT_EQ(carnot_experiment("lift", R"({"group": "h1", "control": "square", "steps": 400})", dir.c_str(), 1, 1, &s2.p),
	          CARNOT_OK);
	ASSERT_EQ(carnot_hash_file(csv.c_str(), &h2.p), CARNOT_OK);
	EXPECT_STREQ(h1.p, h2.p);

	const char* outs[] = {csv.c_str()};
	std::string mpath = dir + "/m.json";
	ASSERT_EQ(carnot_write_manifest(mpath.c_str(), "experiment lift", nullptr, 0, outs, 1, 7), CARNOT_OK);
	std::ifstream in(mpath);
	json m = json::parse(in);
	EXPECT_EQ(m["seed"], 7);
	EXPECT_EQ(m["outputs"][0]["fnv1a"], std::string(h1.p));

	Out bad;
	EXPECT_EQ(carnot_experiment("lift", R"({"control": "square"})", dir.c_str(), 1, 1, &bad.p), CARNOT_INVALID);
	EXPECT_EQ(carnot_experiment("warp", "{}", dir.c_str(), 1, 1, &bad.p), CARNOT_INVALID);
	EXPECT_EQ(carnot_experiment("lift", "{oops", dir.c_str(), 1, 1, &bad.p), CARNOT_INVALID);
}
