#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "mamv/report.hpp"

using namespace mamv;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

Outcome run_config(const json& cfg) {
    std::ostringstream out, err;
    const int code = cli::run(cfg, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

json error_of(const std::string& err) {
    return json::parse(csv_lines(err).back())["error"];
}

}  // namespace

TEST(Cli, ParaboloidExampleIsExact) {
    const Outcome o = invoke({"example", "--name", "paraboloid-exactness"});
    ASSERT_EQ(o.code, cli::kOk) << o.err;
    EXPECT_EQ(csv_lines(o.out).front(), csv_header());
    EXPECT_NE(o.err.find("verdict exact"), std::string::npos);
    EXPECT_EQ(o.err.find("verdict fails"), std::string::npos);
}

TEST(Cli, UPlusRate) {
    const Outcome o = invoke({"rate", "--function", "u_plus", "--x", "0,0", "--variant", "solid_restricted", "--phi",
                              "power:0.5"});
    ASSERT_EQ(o.code, cli::kOk) << o.err;
    const std::size_t at = o.err.find("slope ");
    ASSERT_NE(at, std::string::npos);
    EXPECT_GE(std::stod(o.err.substr(at + 6)), 3.7);
    EXPECT_NE(o.err.find("passes"), std::string::npos);
}

TEST(Cli, SolveReportsErrorAgainstExact) {
    const Outcome o = invoke({"solve", "--domain", "rect:-1,-1,1,1", "--f", "const:1", "--g", "radial_quadratic",
                              "--h", "0.1", "--eps", "0.2"});
    ASSERT_EQ(o.code, cli::kOk) << o.err;
    const std::size_t at = o.err.find("max error ");
    ASSERT_NE(at, std::string::npos);
    EXPECT_LE(std::stod(o.err.substr(at + 10)), 5e-3);
    const std::vector<std::string> lines = csv_lines(o.out);
    EXPECT_EQ(lines.front(), "x,y,u");
    EXPECT_EQ(lines.size(), 1u + 21u * 21u);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const std::vector<std::string> args{"rate", "--function", "cone_shell", "--x", "1.2,0.3", "--variant",
                                        "solid_domain", "--domain", "disc:0,0,2"};
    const Outcome a = invoke(args);
    const Outcome b = invoke(args);
    ASSERT_EQ(a.code, cli::kOk) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigEquivalentToFlags) {
    const Outcome flags = invoke({"rate", "--function", "u_plus", "--x", "0,0", "--variant", "solid_restricted"});
    const Outcome cfg = run_config(
        {{"command", "rate"}, {"function", "u_plus"}, {"x", {0.0, 0.0}}, {"variant", "solid_restricted"}});
    ASSERT_EQ(cfg.code, cli::kOk) << cfg.err;
    EXPECT_EQ(flags.out, cfg.out);
}

TEST(Cli, JsonDomainLiteral) {
    const std::vector<std::string> base{"solve", "--f", "const:1", "--g", "radial_quadratic", "--h", "0.1",
                                        "--eps", "0.2", "--domain"};
    std::vector<std::string> literal = base;
    literal.push_back(R"({"rect":{"lo":[-1,-1],"hi":[1,1]}})");
    std::vector<std::string> text = base;
    text.push_back("rect:-1,-1,1,1");
    const Outcome a = invoke(literal);
    ASSERT_EQ(a.code, cli::kOk) << a.err;
    EXPECT_EQ(a.out, invoke(text).out);
}

TEST(Cli, SchemaViolationsExitTwo) {
    Outcome o = run_config({{"command", "rate"}, {"function", "nope"}});
    EXPECT_EQ(o.code, cli::kValidation);
    EXPECT_EQ(error_of(o.err)["code"], "InvalidConfig");
    EXPECT_EQ(error_of(o.err)["exit"], 2);

    o = run_config({{"command", "rate"}, {"unknown_key", 1}});
    EXPECT_EQ(o.code, cli::kValidation);

    o = run_config({{"command", "solve"}, {"domain", {{"disc", {{"center", {0, 0}}}}}}});
    EXPECT_EQ(o.code, cli::kValidation);

    o = run_config({{"command", "solve"}, {"domain", {{"ball", 1}}}});
    EXPECT_EQ(o.code, cli::kValidation);

    o = invoke({"rate", "--eps", "abc"});
    EXPECT_EQ(o.code, cli::kValidation);

    o = invoke({"frobnicate"});
    EXPECT_EQ(o.code, cli::kValidation);
}

TEST(Cli, InvalidInputExitsTwo) {
    Outcome o = invoke({"solve", "--domain", "whole", "--f", "const:1", "--g", "const:0", "--h", "0.1", "--eps",
                        "0.2"});
    EXPECT_EQ(o.code, cli::kValidation);
    EXPECT_EQ(error_of(o.err)["code"], "InvalidDomain");

    o = invoke({"solve", "--domain", "rect:-1,-1,1,1", "--f", "const:1", "--g", "const:0", "--h", "0.1", "--eps",
                "0.1"});
    EXPECT_EQ(o.code, cli::kValidation);
    EXPECT_EQ(error_of(o.err)["code"], "InvalidArgument");
}

TEST(Cli, NonConvergenceExitsThree) {
    const Outcome o = invoke({"solve", "--domain", "rect:-1,-1,1,1", "--f", "const:1", "--g", "radial_quadratic",
                              "--h", "0.1", "--eps", "0.2", "--max_iter", "3"});
    EXPECT_EQ(o.code, cli::kNumerical);
    const json e = error_of(o.err);
    EXPECT_EQ(e["code"], "NotConverged");
    EXPECT_EQ(e["details"]["iterations"], 3);
}

TEST(Cli, HelpExitsZero) {
    const Outcome o = invoke({"solve", "--help"});
    EXPECT_EQ(o.code, cli::kOk);
    EXPECT_NE((o.out + o.err).find("--search.rotations"), std::string::npos);
}

TEST(Cli, ParseDomain) {
    EXPECT_TRUE(cli::parse_domain("whole").is_whole_space());
    EXPECT_TRUE(cli::parse_domain(json{{"whole_space", true}}).is_whole_space());
    const ConvexDomain disc = cli::parse_domain(json{{"disc", {{"center", {1.0, 0.0}}, {"radius", 0.5}}}});
    EXPECT_NEAR(disc.boundary_distance(Vec{1.0, 0.0}), 0.5, 1e-12);
    const ConvexDomain tri = cli::parse_domain("polygon:0,0,1,0,0,1");
    EXPECT_TRUE(tri.contains(Vec{0.2, 0.2}));
    EXPECT_FALSE(tri.contains(Vec{0.6, 0.6}));
    const ConvexDomain rect = cli::parse_domain(json{{"polygon", {{0, 0}, {2, 0}, {2, 1}, {0, 1}}}});
    EXPECT_NEAR(rect.boundary_distance(Vec{1.0, 0.5}), 0.5, 1e-12);
    EXPECT_THROW(cli::parse_domain("disc:0,0"), Error);
    EXPECT_THROW(cli::parse_domain("oval:1"), Error);
}

TEST(Cli, ParsePhi) {
    EXPECT_NEAR(cli::parse_phi("power:0.5")(0.04), 5.0, 1e-12);
    EXPECT_EQ(cli::parse_phi("const:3")(0.1), 3.0);
    const PhiSchedule table = cli::parse_phi("table:0.1=2;0.05=3");
    EXPECT_NEAR(table(0.1), 2.0, 1e-12);
    EXPECT_NEAR(table(0.05), 3.0, 1e-12);
    EXPECT_THROW(cli::parse_phi("power"), Error);
}

TEST(Cli, ParseField) {
    EXPECT_EQ(cli::parse_field("const:2.5", false)(Vec{1.0, 1.0}), 2.5);
    EXPECT_NEAR(cli::parse_field("radial_quadratic", true)(Vec{0.3, 0.1}), 1.0, 1e-12);
    EXPECT_NEAR(cli::parse_field("radial_quadratic", false)(Vec{0.6, 0.8}), 0.5, 1e-12);
    EXPECT_THROW(cli::parse_field("nope", false), Error);
}
