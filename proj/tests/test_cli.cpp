#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "moo/cli.hpp"
#include "support.hpp"

using namespace moo;
using namespace moo::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome moo_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "moo");
    std::ostringstream o, e;
    int code = cli::run(args, o, e);
    return {code, o.str(), e.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("moo-cli-test-" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string corpus(const std::string& rel) const { return (corpus_dir() / rel).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, RunSucceeds) {
    Outcome r = moo_cli({"run", corpus("counter/classes.moo"), corpus("counter/driver.moo")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "4\n1\n23\n3\n24\n");
}

TEST_F(Cli, ViolationExitsThree) {
    std::string list = corpus("dlist/list.moo"), faulty = corpus("dlist/dlinkedlist_faulty.moo");
    fs::path out = dir_ / "woven";
    ASSERT_EQ(moo_cli({"weave", "--spec", corpus("dlist/spec.json"), "--out", out.string(), list, faulty}).code, 0);
    std::vector<std::string> args = {"run", "--trace", list, faulty};
    for (const auto& e : fs::directory_iterator(out))
        if (e.path().extension() == ".moo") args.push_back(e.path().string());
    args.push_back(corpus("dlist/test_remove_woven.moo"));
    Outcome r = moo_cli(args);
    EXPECT_EQ(r.code, 3) << r.err;
    EXPECT_NE(r.out.find("CHECK 1 DLinkedList construction <init>\n"), std::string::npos);
    EXPECT_TRUE(r.out.ends_with("VIOLATION DLinkedList 0 exit remove\n")) << r.out;
}

TEST_F(Cli, MalformedSpecExitsOne) {
    std::string spec = write("bad.json", "{\"classes\": 3}");
    Outcome r = moo_cli({"weave", "--spec", spec, "--out", (dir_ / "o").string(), corpus("queue/classes.moo")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("malformed-spec"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "o"));
    std::string bad_pred = write("pred.json", R"({"classes": [{"name": "Queue", "invariant": ["length("]}]})");
    EXPECT_EQ(moo_cli({"report", "--spec", bad_pred, corpus("queue/classes.moo")}).code, 1);
}

TEST_F(Cli, UnwritableOutputExitsTwo) {
    std::string blocker = write("file", "x");
    Outcome r = moo_cli({"weave", "--spec", corpus("queue/spec.json"), "--out", blocker + "/sub",
                         corpus("queue/classes.moo")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("[io]"), std::string::npos);
}

TEST_F(Cli, MissingInputExitsTwo) {
    EXPECT_EQ(moo_cli({"run", (dir_ / "absent.moo").string()}).code, 2);
    EXPECT_EQ(moo_cli({"report", "--spec", (dir_ / "absent.json").string(), corpus("queue/classes.moo")}).code, 2);
}

TEST_F(Cli, DiagnosticsExitOne) {
    EXPECT_EQ(moo_cli({"run", write("syntax.moo", "class {")}).code, 1);
    Outcome t = moo_cli({"run", write("types.moo", "driver { int x = true; }")});
    EXPECT_EQ(t.code, 1);
    EXPECT_NE(t.err.find("type-mismatch"), std::string::npos);
    Outcome f = moo_cli({"run", write("fault.moo", "driver { int z = 0; print(1 / z); }")});
    EXPECT_EQ(f.code, 1);
    EXPECT_NE(f.err.find("div-by-zero"), std::string::npos);
    EXPECT_EQ(moo_cli({}).code, 1);
    EXPECT_EQ(moo_cli({"weave", corpus("queue/classes.moo")}).code, 1); // --spec and --out are required
}

TEST_F(Cli, EntryChoosesAmongDrivers) {
    std::string a = write("a.moo", "driver { print(\"a\"); }");
    std::string b = write("b.moo", "driver { print(\"b\"); }");
    Outcome both = moo_cli({"run", a, b});
    EXPECT_EQ(both.code, 1);
    EXPECT_NE(both.err.find("multiple-drivers"), std::string::npos);
    Outcome chosen = moo_cli({"run", "--entry", b, a, b});
    EXPECT_EQ(chosen.code, 0);
    EXPECT_EQ(chosen.out, "b\n");
}

TEST_F(Cli, WeaveIsDeterministic) {
    auto weave_to = [&](const std::string& sub) {
        return moo_cli({"weave", "--spec", corpus("boxes/spec.json"), "--out", (dir_ / sub).string(),
                        corpus("boxes/classes.moo")});
    };
    Outcome first = weave_to("one");
    ASSERT_EQ(first.code, 0) << first.err;
    ASSERT_EQ(weave_to("two").code, 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir_ / "one")) {
        EXPECT_EQ(read_file(e.path()), read_file(dir_ / "two" / e.path().filename())) << e.path();
        ++files;
    }
    EXPECT_EQ(files, 8u); // 3 interfaces, 3 exposed classes, visitor, report
    EXPECT_NE(first.out.find("wrote 7 declarations"), std::string::npos);
}

TEST_F(Cli, WeaveMatchesGolden) {
    ASSERT_EQ(moo_cli({"weave", "--spec", corpus("dlist/spec.json"), "--out", dir_.string(),
                       corpus("dlist/list.moo"), corpus("dlist/dlinkedlist.moo")})
                  .code,
              0);
    for (const auto& e : fs::directory_iterator(golden_dir() / "dlist"))
        EXPECT_EQ(read_file(dir_ / e.path().filename()), read_file(e.path())) << e.path().filename();
}

TEST_F(Cli, ReportOnChain) {
    Outcome r = moo_cli({"report", "--spec", corpus("chain8/spec.json"), corpus("chain8/classes.moo")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("h = 8\nn = 7\nformula_bound = 252\n"), std::string::npos) << r.out;
    EXPECT_TRUE(r.out.ends_with("PASS measured 252 <= bound 252\n")) << r.out;
}
