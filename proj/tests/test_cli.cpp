/*
 * Copyright 2026 The infolab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "infolab/csv.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& scratch()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "infolab_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the CLI with stdout and stderr captured; returns the exit status.
int run(const std::string& args, std::string* err = nullptr)
{
    const fs::path out = scratch() / "stdout.txt", errp = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + INFOLAB_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            errp.string() + "\"";
    const int status = std::system(cmd.c_str());
    if (err) *err = slurp(errp);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& root)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
    return files;
}

// Runs a subcommand twice with the same configuration and compares every
// output byte, then checks that each CSV parses with the library loader.
void check_rerun_identical(const std::string& name, const std::string& args)
{
    const fs::path root = scratch() / name;
    const std::string cmd = "-o \"" + root.string() + "\" --experiment x " + args;
    std::string err;
    REQUIRE_MESSAGE(run(cmd, &err) == 0, err);
    const auto first = tree(root);
    REQUIRE(run(cmd) == 0);
    CHECK(first.size() >= 2);
    CHECK(tree(root) == first);
    for (const auto& [path, text] : first) {
        if (path.size() < 4 || path.substr(path.size() - 4) != ".csv") continue;
        std::istringstream in(text);
        CAPTURE(path);
        CHECK(!infolab::parse_csv(in).header.empty());
    }
}

} // namespace

TEST_CASE("usage and configuration errors exit 2 with an error document")
{
    std::string err;
    CHECK(run("", &err) == 2);
    CHECK(nlohmann::json::parse(err).at("status") == "error");

    CHECK(run("train --set train.nope=1", &err) == 2);
    const auto j = nlohmann::json::parse(err);
    CHECK(j.at("exit_code") == 2);
    CHECK(j.at("kind") == "config_error");
    CHECK(j.at("message").get<std::string>().find("nope") != std::string::npos);

    CHECK(run("train -c /nonexistent/file.cfg", &err) == 2);
    CHECK(run("entropy --mixture /nonexistent.json", &err) == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("numerical failures exit 3 and keep the partial trace")
{
    const fs::path root = scratch() / "abort";
    std::string err;
    CHECK(run("-o \"" + root.string() + "\" --experiment a train --set train.optimizer=sgd --set train.learning_rate=1e300 "
              "--set train.epochs=2", &err) == 3);
    CHECK(nlohmann::json::parse(err).at("exit_code") == 3);
    const auto report = nlohmann::json::parse(slurp(root / "a" / "0" / "report.json"));
    CHECK(report.at("status") == "aborted");
    CHECK(fs::exists(root / "a" / "0" / "trace.csv"));
}

TEST_CASE("failed checks exit 4")
{
    std::string err;
    CHECK(run("-o \"" + (scratch() / "chk").string() + "\" gmm-collapse --set gmm.lr_params=0 --set gmm.lr_inputs=0 "
              "--set gmm.steps=5 --expect collapse", &err) == 4);
    CHECK(nlohmann::json::parse(err).at("kind").get<std::string>().rfind("check_failed", 0) == 0);
}

TEST_CASE("every subcommand reruns byte for byte")
{
    const std::string quick = "--set train.epochs=2 --set eval.n_probe_test=200 ";
    check_rerun_identical("entropy", "--seed 3 entropy --mc-samples 2000 --set data.n_points=16");
    check_rerun_identical("train", quick + "train");
    check_rerun_identical("bound", quick + "--set bound.n_sign_draws=50 bound");
    check_rerun_identical("gauss", "--set gaussianity.n_per_point=64 --set data.n_points=8 validate-gaussianity");
    check_rerun_identical("pairwise", "--set data.n_points=100 pairwise-dist");
    check_rerun_identical("gmm", "--set gmm.steps=20 gmm-collapse");
    check_rerun_identical("compare", quick + "compare --methods vicreg,invariance_only --seeds 3");
    check_rerun_identical("track", "track-entropy --methods vicreg,infonce --steps 6");
}

TEST_CASE("output layout")
{
    const fs::path root = scratch() / "layout";
    REQUIRE(run("-o \"" + root.string() + "\" --experiment lay --seed 5 train --set train.epochs=1") == 0);
    const fs::path dir = root / "lay" / "5";
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(dir / "checkpoint.json"));
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "config.cfg"));

    // A saved checkpoint feeds the bound subcommand.
    REQUIRE(run("-o \"" + root.string() + "\" --experiment lay_bound --seed 5 bound --set bound.n_sign_draws=20 --checkpoint \"" +
                (dir / "checkpoint.json").string() + "\"") == 0);
    const auto report = nlohmann::json::parse(slurp(root / "lay_bound" / "5" / "report.json"));
    CHECK(report.contains("total_bound"));
}
