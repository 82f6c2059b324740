#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "kvge/cli/commands.hpp"

using nlohmann::json;
using namespace kvge::cli;

namespace {

json load_golden(const std::string& name) {
    std::ifstream in(std::string(KVGE_GOLDEN_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing golden file " + name);
    return json::parse(in);
}

// Same key tree, same types, strings equal, numbers within rel_tol.
void expect_matches(const json& expected, const json& actual, double rel_tol, const std::string& path = "$") {
    if (expected.is_number() && actual.is_number()) {
        const double e = expected.get<double>();
        const double a = actual.get<double>();
        EXPECT_LE(std::abs(a - e), rel_tol * std::max(1.0, std::abs(e))) << path;
        return;
    }
    ASSERT_EQ(expected.type_name(), std::string(actual.type_name())) << path;
    if (expected.is_object()) {
        for (const auto& [key, value] : expected.items()) {
            ASSERT_TRUE(actual.contains(key)) << path << " lacks " << key;
            expect_matches(value, actual[key], rel_tol, path + "." + key);
        }
        for (const auto& [key, value] : actual.items())
            EXPECT_TRUE(expected.contains(key)) << path << " has unexpected " << key;
    } else if (expected.is_array()) {
        ASSERT_EQ(expected.size(), actual.size()) << path;
        for (std::size_t i = 0; i < expected.size(); ++i)
            expect_matches(expected[i], actual[i], rel_tol, path + "[" + std::to_string(i) + "]");
    } else {
        EXPECT_EQ(expected, actual) << path;
    }
}

}  // namespace

TEST(Golden, CertifyExampleReport) {
    const auto out = run_command("certify", load_config("example212"));
    expect_matches(load_golden("certify_example212.json"), out.report, 1e-9);
}

TEST(Golden, ConstantsExampleReport) {
    const auto out = run_command("constants", load_config("example212"));
    expect_matches(load_golden("constants_example212.json"), out.report, 1e-9);
}

TEST(Golden, SolveQuadraticReport) {
    const auto out = run_command("solve", load_config("quadratic"));
    expect_matches(load_golden("solve_quadratic.json"), out.report, 1e-7);
}

TEST(Golden, BundledConfigsMatchSourceFiles) {
    for (const auto& name : bundled_names()) {
        std::ifstream in(std::string(KVGE_CONFIG_DIR) + "/" + name + ".json");
        ASSERT_TRUE(in) << name;
        const auto from_file = parse_config(std::string(std::istreambuf_iterator<char>(in), {}));
        const auto bundled = load_config(name);
        EXPECT_EQ(from_file.A, bundled.A) << name;
        EXPECT_EQ(from_file.lambda, bundled.lambda) << name;
    }
}
