#include <string>

#include "doctest.h"
#include "ecotrace/config.hpp"
#include "ecotrace/error.hpp"

using namespace ecotrace;

namespace {

ErrorCode code_of_parse(const std::string& text, std::string* msg = nullptr) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  return ErrorCode::ok;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("empty text needs a model") {
    std::string msg;
    CHECK(code_of_parse("", &msg) == ErrorCode::missing_key);
    CHECK(msg.find("model.name") != std::string::npos);
    const RunConfig c = parse_config_text("");
    CHECK(c == RunConfig{});
  }

  TEST_CASE("missing model parameters are listed") {
    std::string msg;
    CHECK(code_of_parse("model.name = \"sc4bp\"\n", &msg) == ErrorCode::missing_key);
    CHECK(msg.find("model.alpha") != std::string::npos);
    CHECK(code_of_parse("[model]\nname = c3bp\nmasses = 1,1,1\n", &msg) == ErrorCode::missing_key);
    CHECK(msg.find("model.c3bp.lambda") != std::string::npos);
    CHECK(msg.find("model.c3bp.gap_left") != std::string::npos);
    CHECK(msg.find("model.c3bp.gap_right") != std::string::npos);
    CHECK(code_of_parse("model.name = rec4bp\n") == ErrorCode::ok);
  }

  TEST_CASE("sections and dotted keys are the same") {
    const RunConfig a = parse_config("[model]\nname = \"sc4bp\"\nalpha = 1.1\n[search]\nsigma = b,a,b\n");
    const RunConfig b = parse_config("model.name = sc4bp\nmodel.alpha = 1.1\nsearch.sigma = \"b,a,b\"\n");
    CHECK(a == b);
    CHECK(a.model_name == "sc4bp");
    CHECK(*a.alpha == 1.1);
    CHECK(a.sigma == "bab");
  }

  TEST_CASE("comments and defaults") {
    const RunConfig c = parse_config("# a comment\n; another\nmodel.name = rec4bp\nh = -2.5\n");
    CHECK(c.h == -2.5);
    CHECK(c.rtol == 1e-12);
    CHECK(c.format == OutputFormat::csv);
  }

  TEST_CASE("diagnostics carry the line") {
    std::string msg;
    CHECK(code_of_parse("model.name = rec4bp\n\nmodel.colour = red\n", &msg) == ErrorCode::unknown_key);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("model.colour") != std::string::npos);
    CHECK(code_of_parse("model.name = rec4bp\nh = minus one\n", &msg) == ErrorCode::parse);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(code_of_parse("[model\nname = rec4bp\n", &msg) == ErrorCode::parse);
    CHECK(msg.find("line 1") != std::string::npos);
    CHECK(code_of_parse("model.name = rec4bp\nh = -1\nh = -2\n", &msg) == ErrorCode::parse);
    CHECK(code_of_parse("model.name = rec4bp\nsearch.sigma = b,x\n", &msg) == ErrorCode::parse);
    CHECK(code_of_parse("model.name = rec4bp\noutput.format = xml\n") == ErrorCode::parse);
  }

  TEST_CASE("range checks") {
    CHECK(code_of_parse("model.name = rec4bp\nh = 0.5\n") == ErrorCode::invalid_argument);
    CHECK(code_of_parse("model.name = rec4bp\nintegration.rtol = 1\n") == ErrorCode::unknown_key);
    CHECK(code_of_parse("model.name = rec4bp\ninteg.rtol = -1\n") == ErrorCode::invalid_argument);
    CHECK(code_of_parse("model.name = moon\n") == ErrorCode::invalid_argument);
  }

  TEST_CASE("emit and reparse") {
    RunConfig c = parse_config("model.name = sc4bp\nmodel.alpha = 0.1\nh = -1.25\nsearch.sigma = babab\n"
                               "integ.rtol = 3e-11\noutput.format = json\nsearch.mirror = false\n");
    const std::string text = emit_config(c);
    CHECK(parse_config(text) == c);
    CHECK(emit_config(parse_config(text)) == text);
    CHECK(text.find("[model]") != std::string::npos);
    CHECK(text.find("alpha = 0.1\n") != std::string::npos);
    RunConfig d = parse_config("model.name = c3bp\nmodel.masses = 1, 2, 3\nmodel.c3bp.lambda = 0.9\n"
                               "model.c3bp.gap_left = 1\nmodel.c3bp.gap_right = 2\n");
    CHECK(parse_config(emit_config(d)) == d);
    CHECK(d.masses->size() == 3);
  }

  TEST_CASE("hash") {
    RunConfig a = parse_config("model.name = rec4bp\n");
    RunConfig b = a;
    b.output_dir = "/elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 8);
    b.h = -2;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("get and set") {
    RunConfig c;
    set_config_value(c, "model.name", "rh4bp");
    set_config_value(c, "model.alpha", "0.5");
    set_config_value(c, "search.mirror", "false");
    CHECK(get_config_value(c, "model.alpha") == "0.5");
    CHECK(get_config_value(c, "model.masses") == "");
    CHECK(get_config_value(c, "search.mirror") == "false");
    CHECK_FALSE(c.mirror);
    CHECK_THROWS_AS(set_config_value(c, "nope", "1"), Error);
    CHECK_THROWS_AS(get_config_value(c, "nope"), Error);
    for (const auto& k : config_keys()) CHECK_NOTHROW(get_config_value(c, k.name));
    CHECK(config_keys().size() >= 40);
  }

  TEST_CASE("models and options from a config") {
    CHECK(make_model(parse_config("model.name = rec4bp\n")).name() == "rec4bp");
    CHECK(make_model(parse_config("model.name = rh4bp\nmodel.alpha = 2\n")).name() == "rh4bp");
    CHECK(make_model(parse_config("model.name = sc4bp\nmodel.alpha = 2\n")).theta_a() > 0.9);
    CHECK(make_model(parse_config("model.name = sym2n\nmodel.sym2n.n = 3\n")).name() == "sym2n");
    const auto m = make_model(parse_config("model.name = rec4bp\nmodel.mass.a1 = 4\n"));
    CHECK(m.mass_matrix().a1 == 4.0);
    const RunConfig c = parse_config("model.name = rec4bp\ninteg.rtol = 1e-10\nsearch.eps = 1e-5\ntrace.eps = 1e-7\n");
    CHECK(integ_options(c).rtol == 1e-10);
    CHECK(trace_options(c).eps == 1e-7);
    CHECK(search_options(c).arcs.eps == 1e-5);
    CHECK(search_options(c).arcs.integ.project_shell);
  }
}
