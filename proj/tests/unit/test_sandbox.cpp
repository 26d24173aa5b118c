#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "firecrest/machine/sandbox_fs.hpp"
#include "firecrest/util/errors.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

using namespace firecrest;
using firecrest::machine::SandboxFs;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    test_support::TempDir dir;
    SandboxFs fsbox{dir.path() / "machine", {"alice", "bob"}};
    Fixture() {
        fsbox.ensure_user_home("alice");
        fsbox.ensure_user_home("bob");
    }
    fs::path host_home(const std::string& user = "alice") {
        return dir.path() / "machine" / "home" / user;
    }
};

int status_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ApiError& e) {
        return e.status();
    }
    return 0;
}

}  // namespace

TEST_SUITE_BEGIN("sandbox");

TEST_CASE("write/read/list basics against direct host inspection") {
    Fixture f;
    f.fsbox.mkdir("alice", "/home/alice/data", false);
    f.fsbox.write_file("alice", "/home/alice/data/hello.txt", "hello world", false);

    // Oracle: the bytes exist on the host filesystem exactly once.
    std::ifstream in(f.host_home() / "data" / "hello.txt");
    std::string host_bytes((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    CHECK(host_bytes == "hello world");
    CHECK(f.fsbox.read_file("alice", "/home/alice/data/hello.txt") == "hello world");

    auto entries = f.fsbox.list_dir("alice", "/home/alice/data");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].name == "hello.txt");
    CHECK(entries[0].type == "file");
    CHECK(entries[0].size == 11);
    CHECK(entries[0].owner == "alice");

    // ls of a file yields a single entry
    auto single = f.fsbox.list_dir("alice", "/home/alice/data/hello.txt");
    REQUIRE(single.size() == 1);
    CHECK(single[0].name == "hello.txt");

    // empty dir lists empty
    f.fsbox.mkdir("alice", "/home/alice/empty", false);
    CHECK(f.fsbox.list_dir("alice", "/home/alice/empty").empty());
}

TEST_CASE("file and symlink entries are distinguished") {
    Fixture f;
    f.fsbox.mkdir("alice", "/home/alice/mix", false);
    f.fsbox.write_file("alice", "/home/alice/mix/plain", "x", false);
    f.fsbox.symlink("alice", "/home/alice/mix/plain", "/home/alice/mix/link");
    auto entries = f.fsbox.list_dir("alice", "/home/alice/mix");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].name == "link");
    CHECK(entries[0].type == "symlink");
    CHECK(entries[0].link_target == "/home/alice/mix/plain");
    CHECK(entries[1].name == "plain");
    CHECK(entries[1].type == "file");
}

TEST_CASE("file_type classification oracle table") {
    Fixture f;
    f.fsbox.mkdir("alice", "/home/alice/t", false);
    f.fsbox.write_file("alice", "/home/alice/t/empty", "", false);
    f.fsbox.write_file("alice", "/home/alice/t/text", "printable ascii\nwith lines\n", false);
    f.fsbox.write_file("alice", "/home/alice/t/binary", std::string("\x00\x01\x02\xff", 4),
                       false);
    f.fsbox.symlink("alice", "/home/alice/t/text", "/home/alice/t/lnk");

    CHECK(f.fsbox.file_type("alice", "/home/alice/t") == "directory");
    CHECK(f.fsbox.file_type("alice", "/home/alice/t/empty") == "empty");
    CHECK(f.fsbox.file_type("alice", "/home/alice/t/text") == "ASCII text");
    CHECK(f.fsbox.file_type("alice", "/home/alice/t/binary") == "data");
    CHECK(f.fsbox.file_type("alice", "/home/alice/t/lnk") ==
          "symbolic link to /home/alice/t/text");
    CHECK(status_of([&] { f.fsbox.file_type("alice", "/home/alice/t/none"); }) == 404);
}

TEST_CASE("mkdir with and without parents") {
    Fixture f;
    f.fsbox.mkdir("alice", "/home/alice/one", false);
    CHECK(f.fsbox.exists("alice", "/home/alice/one"));
    CHECK(status_of([&] { f.fsbox.mkdir("alice", "/home/alice/one", false); }) == 409);
    CHECK(status_of([&] { f.fsbox.mkdir("alice", "/home/alice/a/b/c", false); }) == 404);
    f.fsbox.mkdir("alice", "/home/alice/a/b/c", true);
    CHECK(f.fsbox.exists("alice", "/home/alice/a/b/c"));
    CHECK_NOTHROW(f.fsbox.mkdir("alice", "/home/alice/a/b/c", true));  // -p idempotent
}

TEST_CASE("rename follows rename(2) semantics") {
    Fixture f;
    f.fsbox.write_file("alice", "/home/alice/src.txt", "source", false);
    f.fsbox.rename("alice", "/home/alice/src.txt", "/home/alice/dst.txt");
    CHECK(!f.fsbox.exists("alice", "/home/alice/src.txt"));
    CHECK(f.fsbox.read_file("alice", "/home/alice/dst.txt") == "source");

    CHECK(status_of([&] {
              f.fsbox.rename("alice", "/home/alice/missing", "/home/alice/x");
          }) == 404);

    // Rename over an existing target replaces it, as rename(2) does.
    f.fsbox.write_file("alice", "/home/alice/a.txt", "AAA", false);
    f.fsbox.write_file("alice", "/home/alice/b.txt", "BBB", false);
    f.fsbox.rename("alice", "/home/alice/a.txt", "/home/alice/b.txt");
    CHECK(f.fsbox.read_file("alice", "/home/alice/b.txt") == "AAA");
    CHECK(!f.fsbox.exists("alice", "/home/alice/a.txt"));
}

TEST_CASE("chmod changes visible permissions; bad modes rejected") {
    Fixture f;
    f.fsbox.write_file("alice", "/home/alice/f", "x", false);
    f.fsbox.chmod("alice", "/home/alice/f", "755");
    auto entries = f.fsbox.list_dir("alice", "/home/alice/f");
    CHECK(entries[0].permissions == "rwxr-xr-x");
    f.fsbox.chmod("alice", "/home/alice/f", "600");
    CHECK(f.fsbox.list_dir("alice", "/home/alice/f")[0].permissions == "rw-------");

    CHECK(status_of([&] { f.fsbox.chmod("alice", "/home/alice/f", "9z9"); }) == 400);
    CHECK(status_of([&] { f.fsbox.chmod("alice", "/home/alice/f", "77777"); }) == 400);
    CHECK(status_of([&] { f.fsbox.chmod("alice", "/home/alice/none", "755"); }) == 404);
}

TEST_CASE("chown updates metadata and validates names") {
    Fixture f;
    f.fsbox.write_file("alice", "/home/alice/f", "x", false);
    f.fsbox.chown("alice", "/home/alice/f", "alice", std::nullopt);
    CHECK(f.fsbox.list_dir("alice", "/home/alice/f")[0].owner == "alice");
    f.fsbox.chown("alice", "/home/alice/f", std::nullopt, "bob");
    auto e = f.fsbox.list_dir("alice", "/home/alice/f")[0];
    CHECK(e.owner == "alice");
    CHECK(e.group == "bob");

    CHECK(status_of([&] {
              f.fsbox.chown("alice", "/home/alice/f", std::nullopt, std::nullopt);
          }) == 400);
    CHECK(status_of([&] { f.fsbox.chown("alice", "/home/alice/f", "ghost", std::nullopt); }) ==
          400);
    CHECK(status_of([&] { f.fsbox.chown("alice", "/home/alice/none", "alice", std::nullopt); }) ==
          404);
}

TEST_CASE("symlink creation: dangling allowed, existing link path rejected") {
    Fixture f;
    f.fsbox.symlink("alice", "/home/alice/not-there-yet", "/home/alice/dangler");
    // operations that follow the dangling link see an absent target
    CHECK(status_of([&] { f.fsbox.read_file("alice", "/home/alice/dangler"); }) == 404);
    CHECK(f.fsbox.file_type("alice", "/home/alice/dangler") ==
          "symbolic link to /home/alice/not-there-yet");

    f.fsbox.write_file("alice", "/home/alice/real", "content", false);
    CHECK(status_of([&] { f.fsbox.symlink("alice", "/home/alice/real", "/home/alice/real"); }) ==
          409);
    f.fsbox.symlink("alice", "/home/alice/real", "/home/alice/to-real");
    CHECK(f.fsbox.read_file("alice", "/home/alice/to-real") == "content");
}

TEST_CASE("recursive copy and remove") {
    Fixture f;
    f.fsbox.mkdir("alice", "/home/alice/tree/sub", true);
    f.fsbox.write_file("alice", "/home/alice/tree/a.txt", "A", false);
    f.fsbox.write_file("alice", "/home/alice/tree/sub/b.txt", "B", false);

    f.fsbox.copy_recursive("alice", "/home/alice/tree", "/home/alice/copy");
    CHECK(test_support::tree_checksum(f.host_home() / "tree") ==
          test_support::tree_checksum(f.host_home() / "copy"));

    f.fsbox.remove_recursive("alice", "/home/alice/tree");
    CHECK(!f.fsbox.exists("alice", "/home/alice/tree"));
    CHECK(status_of([&] { f.fsbox.remove_recursive("alice", "/home/alice/tree"); }) == 404);
}

TEST_CASE("path traversal is contained and confined to the user's home") {
    Fixture f;
    // Direct escapes
    CHECK(status_of([&] { f.fsbox.list_dir("alice", "/etc/passwd"); }) == 400);
    CHECK(status_of([&] { f.fsbox.list_dir("alice", "/home/bob"); }) == 400);
    CHECK(status_of([&] { f.fsbox.list_dir("alice", "/home/aliceother"); }) == 400);
    CHECK(status_of([&] { f.fsbox.read_file("alice", "/home/alice/../bob/secret"); }) == 400);
    CHECK(status_of([&] { f.fsbox.read_file("alice", "/home/alice/../../../../etc/passwd"); }) ==
          400);
    CHECK(status_of([&] { f.fsbox.read_file("alice", "relative/path"); }) == 400);

    // ".." inside the home is fine
    f.fsbox.mkdir("alice", "/home/alice/d", false);
    f.fsbox.write_file("alice", "/home/alice/d/../ok.txt", "ok", false);
    CHECK(f.fsbox.read_file("alice", "/home/alice/ok.txt") == "ok");

    // Symlink escape attempts resolve sandbox-absolute and then fail the
    // home check instead of touching the host.
    f.fsbox.symlink("alice", "/../../etc", "/home/alice/esc1");
    CHECK(status_of([&] { f.fsbox.list_dir("alice", "/home/alice/esc1"); }) == 400);
    f.fsbox.symlink("alice", "../../..", "/home/alice/esc2");
    CHECK(status_of([&] { f.fsbox.list_dir("alice", "/home/alice/esc2/etc"); }) == 400);

    // Symlink loops terminate with an error
    f.fsbox.symlink("alice", "/home/alice/loop-b", "/home/alice/loop-a");
    f.fsbox.symlink("alice", "/home/alice/loop-a", "/home/alice/loop-b");
    CHECK(status_of([&] { f.fsbox.read_file("alice", "/home/alice/loop-a"); }) == 400);
}

TEST_CASE("adversarial path fuzz never touches the host outside the root") {
    Fixture f;
    // Canary outside the sandbox root but inside the temp dir.
    auto canary_dir = f.dir.path() / "outside";
    fs::create_directories(canary_dir);
    std::ofstream(canary_dir / "canary.txt") << "untouched";
    auto canary_before = test_support::tree_checksum(canary_dir);

    std::mt19937 rng(1234);
    std::vector<std::string> fragments = {
        "..",      "...",        "%2e%2e",   "home",    "alice",  "bob",
        "etc",     "passwd",     "",         ".",       "outside", "canary.txt",
        "..\\..",  "a b",        "#",        "?x=1",    "~",       "-",
        "machine", "loop-a",     "esc1",     "x/../..", "./..",    "..%2f..",
    };
    for (int i = 0; i < 1200; ++i) {
        std::string path = "/";
        auto depth = 1 + rng() % 6;
        for (std::size_t d = 0; d < depth; ++d) {
            path += fragments[rng() % fragments.size()] + "/";
        }
        // Exercise several operations; only in-home effects may succeed.
        try {
            switch (rng() % 4) {
                case 0: f.fsbox.list_dir("alice", path); break;
                case 1: f.fsbox.mkdir("alice", path, true); break;
                case 2: f.fsbox.write_file("alice", path, "fuzz", true); break;
                case 3: f.fsbox.file_type("alice", path); break;
            }
        } catch (const ApiError&) {
            // rejected: fine
        }
    }
    // The canary tree and everything else outside the machine root survived.
    CHECK(test_support::tree_checksum(canary_dir) == canary_before);
    // No stray entries appeared next to the machine root either.
    int top_level = 0;
    for ([[maybe_unused]] auto& e : fs::directory_iterator(f.dir.path())) ++top_level;
    CHECK(top_level == 2);  // "machine" and "outside" only
}

TEST_SUITE_END();
