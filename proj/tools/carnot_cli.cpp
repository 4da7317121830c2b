#include "carnot/carnot.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Owned
{
	char* p = nullptr;
	~Owned() { carnot_string_free(p); }
};

using GroupPtr = std::unique_ptr<carnot_group, decltype(&carnot_group_free)>;

int fail(carnot_status s)
{
	std::cerr << "error: " << carnot_last_error() << "\n";
	return static_cast<int>(s);
}

// Prints the payload (if any) and maps the status to the exit code.
int finish(carnot_status s, const Owned& out)
{
	if (out.p) std::cout << out.p << "\n";
	if (s != CARNOT_OK) std::cerr << "error: " << carnot_last_error() << "\n";
	return static_cast<int>(s);
}

GroupPtr load(const std::string& name, carnot_status& s)
{
	carnot_group* g = nullptr;
	s = carnot_group_load(name.c_str(), &g);
	return GroupPtr(g, carnot_group_free);
}

std::string slurp(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in) throw std::runtime_error("cannot open '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

int write_manifest(const std::string& path, const std::string& command, const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs, std::uint64_t seed)
{
	std::vector<const char*> in, out;
	for (const auto& s : inputs) in.push_back(s.c_str());
	for (const auto& s : outputs) out.push_back(s.c_str());
	carnot_status s = carnot_write_manifest(path.c_str(), command.c_str(), in.data(), in.size(), out.data(), out.size(), seed);
	return s == CARNOT_OK ? 0 : fail(s);
}

// CSV paths listed under "outputs" in a JSON summary.
std::vector<std::string> listed_outputs(const std::string& summary)
{
	std::vector<std::string> paths;
	auto pos = summary.find("\"outputs\"");
	if (pos == std::string::npos) return paths;
	auto open = summary.find('[', pos), close = summary.find(']', pos);
	std::string list = summary.substr(open + 1, close - open - 1);
	std::size_t q = 0;
	while ((q = list.find('"', q)) != std::string::npos)
	{
		auto e = list.find('"', q + 1);
		paths.push_back(list.substr(q + 1, e - q - 1));
		q = e + 1;
	}
	return paths;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Graded groups: algebra, subgroups, curves and Pansu differentiability"};
	app.require_subcommand(1);
	std::uint64_t seed = 1;
	int threads = 1;
	app.add_option("--seed", seed, "Seed for sampled commands")->capture_default_str();
	app.add_option("--threads", threads, "Worker threads for sampling")->capture_default_str();
	app.set_version_flag("--version", std::string(carnot_version()));

	int code = 0;

	// group
	auto* group = app.add_subcommand("group", "Validate, emit or describe a group definition");
	group->require_subcommand(1);
	std::string gfile, gcatalog, gout;
	auto* ginfo = group->add_subcommand("info", "Dimensions, step, homogeneous dimension, stratified flag");
	ginfo->add_option("file", gfile, "Group JSON file or catalog name")->required();
	auto* gval = group->add_subcommand("validate", "List antisymmetry, Jacobi and grading violations");
	gval->add_option("file", gfile, "Group JSON file or catalog name")->required();
	auto* gemit = group->add_subcommand("emit", "Canonical group JSON");
	gemit->add_option("file", gfile, "Group JSON file");
	gemit->add_option("--catalog", gcatalog, "Catalog name instead of a file");
	gemit->add_option("-o,--output", gout, "Write to this file");

	ginfo->callback([&] {
		carnot_status s;
		auto g = load(gfile, s);
		if (s != CARNOT_OK) return void(code = fail(s));
		Owned out;
		code = finish(carnot_group_info(g.get(), &out.p), out);
	});
	gval->callback([&] {
		carnot_status s;
		auto g = load(gfile, s);
		if (s != CARNOT_OK) return void(code = fail(s));
		Owned out;
		code = finish(carnot_group_validate(g.get(), &out.p), out);
	});
	auto emit = [&](const std::string& src, const std::string& dest) {
		carnot_status s;
		auto g = load(src, s);
		if (s != CARNOT_OK) return fail(s);
		Owned out;
		s = carnot_group_emit(g.get(), &out.p);
		if (s != CARNOT_OK) return fail(s);
		if (dest.empty())
			std::cout << out.p;
		else
			std::ofstream(dest, std::ios::binary) << out.p;
		return 0;
	};
	gemit->callback([&] {
		std::string src = gcatalog.empty() ? gfile : gcatalog;
		if (src.empty()) throw CLI::ValidationError("group emit needs a file or --catalog");
		code = emit(src, gout);
	});

	// catalog
	auto* catalog = app.add_subcommand("catalog", "Built-in groups");
	catalog->require_subcommand(1);
	catalog->add_subcommand("list", "Names of built-in groups")->callback([&] {
		Owned out;
		code = finish(carnot_catalog_list(&out.p), out);
	});
	std::string cname, cdest;
	auto* cemit = catalog->add_subcommand("emit", "Canonical group JSON of a built-in group");
	cemit->add_option("name", cname, "Catalog name")->required();
	cemit->add_option("-o,--output", cdest, "Write to this file");
	cemit->callback([&] { code = emit(cname, cdest); });

	// algebra
	auto* algebra = app.add_subcommand("algebra", "Exact group law computations");
	algebra->require_subcommand(1);
	std::string ag, ax, ay;
	int an = 2, trials = 100;
	auto* aprod = algebra->add_subcommand("product", "log(exp x exp y)");
	aprod->add_option("group", ag)->required();
	aprod->add_option("x", ax, "p/q,... (use -- before negative leading entries)")->required();
	aprod->add_option("y", ay)->required();
	auto* aterm = algebra->add_subcommand("term", "Degree-n BCH term c_n(x, y)");
	aterm->add_option("n", an)->required();
	aterm->add_option("group", ag)->required();
	aterm->add_option("x", ax)->required();
	aterm->add_option("y", ay)->required();
	auto* adec = algebra->add_subcommand("decompose", "Coefficients of c_n over nested brackets of A_1, A_2");
	adec->add_option("n", an)->required();
	auto* aorc = algebra->add_subcommand("oracle", "Cross-check the product against the series oracle");
	aorc->add_option("group", ag)->required();
	aorc->add_option("--trials", trials)->capture_default_str();

	aprod->callback([&] {
		carnot_status s;
		auto g = load(ag, s);
		if (s != CARNOT_OK) return void(code = fail(s));
		Owned out;
		code = finish(carnot_algebra_product(g.get(), ax.c_str(), ay.c_str(), &out.p), out);
	});
	aterm->callback([&] {
		carnot_status s;
		auto g = load(ag, s);
		if (s != CARNOT_OK) return void(code = fail(s));
		Owned out;
		code = finish(carnot_algebra_term(g.get(), an, ax.c_str(), ay.c_str(), &out.p), out);
	});
	adec->callback([&] {
		Owned out;
		code = finish(carnot_algebra_decompose(an, &out.p), out);
	});
	aorc->callback([&] {
		carnot_status s;
		auto g = load(ag, s);
		if (s != CARNOT_OK) return void(code = fail(s));
		Owned out;
		code = finish(carnot_algebra_oracle(g.get(), trials, seed, &out.p), out);
	});

	// subgroups
	auto* subgroups = app.add_subcommand("subgroups", "Classify morphisms, find complements, form quotients");
	std::string scmd, sfile;
	subgroups->add_option("command", scmd, "classify-epi | classify-mono | complement | quotient")
	    ->required()
	    ->check(CLI::IsMember({"classify-epi", "classify-mono", "complement", "quotient"}));
	subgroups->add_option("request", sfile, "Request JSON file")->required()->check(CLI::ExistingFile);
	subgroups->callback([&] {
		Owned out;
		code = finish(carnot_subgroups(scmd.c_str(), slurp(sfile).c_str(), seed, &out.p), out);
	});

	// experiment
	auto* experiment = app.add_subcommand("experiment", "Run a configured experiment; writes CSV and a JSON summary");
	std::string ekind, efile, edir = "out", emanifest;
	experiment->add_option("kind", ekind, "lift | pansu | mvi | implicit | rank | blowup | verify-estimates")
	    ->required()
	    ->check(CLI::IsMember({"lift", "pansu", "mvi", "implicit", "rank", "blowup", "verify-estimates"}));
	experiment->add_option("config", efile, "Config JSON file")->required()->check(CLI::ExistingFile);
	experiment->add_option("--out", edir, "Output directory")->capture_default_str();
	experiment->add_option("--manifest", emanifest, "Manifest path (default <out>/<kind>.manifest.json)");
	experiment->callback([&] {
		Owned out;
		carnot_status s = carnot_experiment(ekind.c_str(), slurp(efile).c_str(), edir.c_str(), seed, threads, &out.p);
		if (s != CARNOT_OK) return void(code = finish(s, out));
		std::string summary = out.p;
		std::filesystem::create_directories(edir);
		std::string spath = (std::filesystem::path(edir) / (ekind + ".summary.json")).string();
		std::ofstream(spath, std::ios::binary) << summary << "\n";
		std::vector<std::string> outputs = listed_outputs(summary);
		outputs.push_back(spath);
		std::string mpath = emanifest.empty() ? (std::filesystem::path(edir) / (ekind + ".manifest.json")).string() : emanifest;
		code = write_manifest(mpath, "experiment " + ekind, {efile}, outputs, seed);
		std::cout << summary << "\n";
	});

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError& e)
	{
		int r = app.exit(e);
		return r == 0 ? 0 : 1;
	}
	catch (const std::exception& e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
	return code;
}
