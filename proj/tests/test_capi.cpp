#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "hjbac/hjbac.h"

namespace {

std::filesystem::path temp_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() / (std::string("hjbac_capi_") + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("catalog and problem lifecycle") {
    const std::string cat = hjbac_catalog();
    CHECK(cat.find("problem1") != std::string::npos);
    CHECK(cat.find("lqr") != std::string::npos);

    hjbac_problem* p = nullptr;
    REQUIRE(hjbac_problem_create("problem1", 4, &p) == HJBAC_OK);
    CHECK(hjbac_problem_dim(p) == 4);
    CHECK(hjbac_problem_action_dim(p) == 4);
    CHECK(hjbac_problem_has_analytic(p) == 1);
    const double x[4] = {0, 0, 0, 0};
    double v = -1;
    CHECK(hjbac_problem_value(p, x, &v) == HJBAC_OK);
    CHECK(v == 1.0);
    hjbac_problem_destroy(p);

    hjbac_problem* bad = nullptr;
    CHECK(hjbac_problem_create("not_a_problem", 0, &bad) == HJBAC_ERR_UNKNOWN_NAME);
    CHECK(std::strlen(hjbac_last_error()) > 0);
  }

  TEST_CASE("train writes checkpoints, metrics and a manifest; verify-mc reads them") {
    const auto dir = temp_dir("train");
    hjbac_problem* p = nullptr;
    REQUIRE(hjbac_problem_create("toy1d", 0, &p) == HJBAC_OK);
    const char* cfg = R"({"actor_width":16,"critic_width":16,"total_cycles":2,
      "critic_steps_per_cycle":5,"actor_steps_per_cycle":5,
      "critic_batch":64,"actor_batch":64,"eval_points":64,"seed":3,"timing":"off"})";
    hjbac_train_summary sum{};
    REQUIRE(hjbac_train(p, cfg, dir.string().c_str(), &sum) == HJBAC_OK);
    CHECK(sum.cycles_run == 2);
    CHECK(std::filesystem::exists(dir / "metrics.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(std::filesystem::exists(dir / "actor.json"));
    CHECK(std::filesystem::exists(dir / "critic.json"));

    hjbac_net* actor = nullptr;
    hjbac_net* critic = nullptr;
    REQUIRE(hjbac_net_load((dir / "actor.json").string().c_str(), &actor) == HJBAC_OK);
    REQUIRE(hjbac_net_load((dir / "critic.json").string().c_str(), &critic) == HJBAC_OK);
    CHECK(hjbac_net_width(actor) == 16);
    CHECK(hjbac_net_output_dim(critic) == 1);

    const double x0 = 0.0;
    double q = 0.0;
    CHECK(hjbac_critic_value(p, critic, &x0, &q) == HJBAC_OK);
    CHECK(std::isfinite(q));

    const auto vdir = temp_dir("verify");
    const char* mc_cfg = R"({"eval_points":4,"paths_per_point":20,"dt":0.002,
      "max_time":10.0,"seed":5})";
    double e[3] = {-1, -1, -1};
    REQUIRE(hjbac_verify_mc(p, actor, critic, mc_cfg, vdir.string().c_str(), e) == HJBAC_OK);
    CHECK(e[0] >= 0.0);
    CHECK(e[1] >= 0.0);
    CHECK(e[2] >= 0.0);
    CHECK(std::filesystem::exists(vdir / "agreement.csv"));
    CHECK(std::filesystem::exists(vdir / "histogram_v_minus_mc.csv"));
    CHECK(std::filesystem::exists(vdir / "manifest.json"));

    // dimension mismatch is refused
    hjbac_problem* p2 = nullptr;
    REQUIRE(hjbac_problem_create("toy2d", 0, &p2) == HJBAC_OK);
    CHECK(hjbac_verify_mc(p2, actor, critic, mc_cfg, vdir.string().c_str(), e) ==
          HJBAC_ERR_INVALID_ARG);

    hjbac_net_destroy(actor);
    hjbac_net_destroy(critic);
    hjbac_problem_destroy(p2);
    hjbac_problem_destroy(p);
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(vdir);
  }

  TEST_CASE("bad inputs produce error codes, not crashes") {
    CHECK(hjbac_net_load("/nope/missing.json", nullptr) == HJBAC_ERR_INVALID_ARG);
    hjbac_net* n = nullptr;
    CHECK(hjbac_net_load("/nope/missing.json", &n) == HJBAC_ERR_IO);
    CHECK(hjbac_study("not-a-study", "{}", "/tmp/hjbac_nostudy") == HJBAC_ERR_UNKNOWN_NAME);
    hjbac_problem* p = nullptr;
    REQUIRE(hjbac_problem_create("toy1d", 0, &p) == HJBAC_OK);
    CHECK(hjbac_train(p, "{not json", "/tmp/hjbac_nojson", nullptr) == HJBAC_ERR_INVALID_ARG);
    hjbac_problem_destroy(p);
  }

  TEST_CASE("study dispatch writes CSV tables") {
    const auto dir = temp_dir("study");
    const char* cfg = R"({"widths":[32,64,128],"reinits":40,"dim":2,"seed":1})";
    REQUIRE(hjbac_study("ntk-variance", cfg, dir.string().c_str()) == HJBAC_OK);
    CHECK(std::filesystem::exists(dir / "ntk_variance.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    std::ifstream in(dir / "ntk_variance.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "width,variance,slope");
    std::filesystem::remove_all(dir);
  }
}
