#include "carnot/carnot.h"

#include "carnot/catalog.hpp"
#include "commands.hpp"

#include <cstring>
#include <filesystem>

struct carnot_group
{
	carnot::GroupFile file;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& s)
{
	char* p = static_cast<char*>(std::malloc(s.size() + 1));
	std::memcpy(p, s.c_str(), s.size() + 1);
	return p;
}

template <class F>
carnot_status guard(F&& f)
{
	last_error.clear();
	try
	{
		return f();
	}
	catch (const carnot::cmd::Undecided& e)
	{
		last_error = e.what();
		return CARNOT_UNDECIDED;
	}
	catch (const carnot::cmd::SolverFailure& e)
	{
		last_error = e.what();
		return CARNOT_SOLVER;
	}
	catch (const carnot::cmd::ValidationFailure& e)
	{
		last_error = e.what();
		return CARNOT_INVALID;
	}
	catch (const carnot::ParseError& e)
	{
		last_error = e.what();
		return CARNOT_INVALID;
	}
	catch (const carnot::SubgroupError& e)
	{
		last_error = e.what();
		return CARNOT_INVALID;
	}
	catch (const std::invalid_argument& e)
	{
		last_error = e.what();
		return CARNOT_INVALID;
	}
	catch (const std::out_of_range& e)
	{
		last_error = e.what();
		return CARNOT_INVALID;
	}
	catch (const nlohmann::json::exception& e)
	{
		last_error = e.what();
		return CARNOT_INVALID;
	}
	catch (const std::exception& e)
	{
		last_error = e.what();
		return CARNOT_ERROR;
	}
	catch (...)
	{
		last_error = "unknown error";
		return CARNOT_ERROR;
	}
}

carnot_status null_arg(const char* what)
{
	last_error = std::string("null argument: ") + what;
	return CARNOT_ERROR;
}

carnot_status emit(const nlohmann::json& j, char** out, carnot_status s = CARNOT_OK)
{
	*out = dup(j.dump(2));
	return s;
}

} // namespace

extern "C" {

const char* carnot_last_error(void) { return last_error.c_str(); }
const char* carnot_version(void) { return "0.1.0"; }
void carnot_string_free(char* s) { std::free(s); }

carnot_status carnot_group_load(const char* name_or_path, carnot_group** out)
{
	if (!name_or_path || !out) return null_arg("carnot_group_load");
	return guard([&] {
		*out = new carnot_group{carnot::resolve_group(name_or_path)};
		return CARNOT_OK;
	});
}

carnot_status carnot_group_parse(const char* json_text, carnot_group** out)
{
	if (!json_text || !out) return null_arg("carnot_group_parse");
	return guard([&] {
		*out = new carnot_group{carnot::parse_group(json_text)};
		return CARNOT_OK;
	});
}

void carnot_group_free(carnot_group* g) { delete g; }

int carnot_group_dim(const carnot_group* g) { return g ? g->file.algebra->dim() : 0; }

carnot_status carnot_group_emit(const carnot_group* g, char** out)
{
	if (!g || !out) return null_arg("carnot_group_emit");
	return guard([&] {
		*out = dup(carnot::emit_group(*g->file.algebra, g->file.metric));
		return CARNOT_OK;
	});
}

carnot_status carnot_group_info(const carnot_group* g, char** out)
{
	if (!g || !out) return null_arg("carnot_group_info");
	return guard([&] { return emit(carnot::cmd::group_info(g->file), out); });
}

carnot_status carnot_group_validate(const carnot_group* g, char** out)
{
	if (!g || !out) return null_arg("carnot_group_validate");
	return guard([&] {
		auto j = carnot::cmd::group_validate(*g->file.algebra);
		if (!j["valid"].get<bool>()) last_error = "grading violations";
		return emit(j, out, j["valid"].get<bool>() ? CARNOT_OK : CARNOT_INVALID);
	});
}

carnot_status carnot_catalog_list(char** out)
{
	if (!out) return null_arg("carnot_catalog_list");
	return guard([&] { return emit(carnot::catalog_names(), out); });
}

carnot_status carnot_algebra_product(const carnot_group* g, const char* x, const char* y, char** out)
{
	if (!g || !x || !y || !out) return null_arg("carnot_algebra_product");
	return guard([&] {
		return emit(carnot::cmd::algebra_product(*g->file.algebra, carnot::parse_rational_vector(x),
		                                         carnot::parse_rational_vector(y)),
		            out);
	});
}

carnot_status carnot_algebra_term(const carnot_group* g, int n, const char* x, const char* y, char** out)
{
	if (!g || !x || !y || !out) return null_arg("carnot_algebra_term");
	return guard([&] {
		return emit(carnot::cmd::algebra_term(*g->file.algebra, n, carnot::parse_rational_vector(x),
		                                      carnot::parse_rational_vector(y)),
		            out);
	});
}

carnot_status carnot_algebra_decompose(int n, char** out)
{
	if (!out) return null_arg("carnot_algebra_decompose");
	return guard([&] { return emit(carnot::cmd::algebra_decompose(n), out); });
}

carnot_status carnot_algebra_oracle(const carnot_group* g, int trials, uint64_t seed, char** out)
{
	if (!g || !out) return null_arg("carnot_algebra_oracle");
	return guard([&] {
		auto j = carnot::cmd::algebra_oracle(*g->file.algebra, trials, seed);
		bool ok = j["ok"].get<bool>();
		if (!ok) last_error = "product disagrees with the series oracle";
		return emit(j, out, ok ? CARNOT_OK : CARNOT_INVALID);
	});
}

carnot_status carnot_subgroups(const char* command, const char* request, uint64_t seed, char** out)
{
	if (!command || !request || !out) return null_arg("carnot_subgroups");
	return guard([&] {
		auto j = carnot::cmd::subgroups(command, nlohmann::json::parse(request), seed);
		bool undecided = j.contains("verdict") && j["verdict"] == "undecided";
		if (undecided) last_error = "semi-decision budget exhausted";
		return emit(j, out, undecided ? CARNOT_UNDECIDED : CARNOT_OK);
	});
}

carnot_status carnot_experiment(const char* kind, const char* config, const char* out_dir, uint64_t seed, int threads,
                                char** out)
{
	if (!kind || !config || !out_dir || !out) return null_arg("carnot_experiment");
	return guard([&] {
		nlohmann::json cfg;
		try
		{
			cfg = nlohmann::json::parse(config);
		}
		catch (const nlohmann::json::parse_error& e)
		{
			throw carnot::ParseError(std::string("config: ") + e.what());
		}
		return emit(carnot::cmd::experiment(kind, cfg, out_dir, seed, threads), out);
	});
}

carnot_status carnot_write_manifest(const char* path, const char* command, const char* const* inputs, size_t n_inputs,
                                    const char* const* outputs, size_t n_outputs, uint64_t seed)
{
	if (!path || !command) return null_arg("carnot_write_manifest");
	return guard([&] {
		nlohmann::json in = nlohmann::json::array(), outs = nlohmann::json::array();
		for (size_t i = 0; i < n_inputs; ++i)
		{
			std::string p = inputs[i];
			bool file = std::filesystem::is_regular_file(p);
			in.push_back({{"path", p}, {"fnv1a", file ? carnot::fnv1a_hex(carnot::read_file(p)) : nullptr}});
		}
		for (size_t i = 0; i < n_outputs; ++i)
		{
			std::string p = outputs[i];
			bool file = std::filesystem::is_regular_file(p);
			outs.push_back({{"path", p}, {"fnv1a", file ? carnot::fnv1a_hex(carnot::read_file(p)) : nullptr}});
		}
		nlohmann::json m{{"command", command},
		                 {"inputs", in},
		                 {"outputs", outs},
		                 {"seed", seed},
		                 {"tool_version", carnot_version()},
		                 {"schema_version", carnot::kSchemaVersion}};
		carnot::write_file(path, m.dump(2) + "\n");
		return CARNOT_OK;
	});
}

carnot_status carnot_hash_file(const char* path, char** out)
{
	if (!path || !out) return null_arg("carnot_hash_file");
	return guard([&] {
		*out = dup(carnot::fnv1a_hex(carnot::read_file(path)));
		return CARNOT_OK;
	});
}

} // extern "C"
