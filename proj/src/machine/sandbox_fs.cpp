#include "firecrest/machine/sandbox_fs.hpp"

#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <fstream>
#include <thread>

#include "firecrest/util/clock.hpp"
#include "firecrest/util/errors.hpp"

namespace firecrest::machine {

namespace fs = std::filesystem;

namespace {

std::string perm_string(mode_t mode) {
    std::string out = "---------";
    const char* bits = "rwxrwxrwx";
    for (int i = 0; i < 9; ++i) {
        if (mode & (1u << (8 - i))) out[i] = bits[i];
    }
    return out;
}

std::vector<std::string> path_components(const std::string& path) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (!cur.empty()) out.push_back(cur), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join_sandbox(const std::vector<std::string>& comps) {
    std::string out = "/";
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i) out.push_back('/');
        out += comps[i];
    }
    return out;
}

bool under_home(const std::string& sandbox_path, const std::string& principal) {
    std::string home = "/home/" + principal;
    return sandbox_path == home ||
           (sandbox_path.size() > home.size() && sandbox_path.compare(0, home.size(), home) == 0 &&
            sandbox_path[home.size()] == '/');
}

}  // namespace

nlohmann::json DirEntry::to_json() const {
    nlohmann::json j = {{"name", name},
                        {"type", type},
                        {"size", size},
                        {"permissions", permissions},
                        {"owner", owner},
                        {"group", group},
                        {"last_modified", iso8601_utc(last_modified)}};
    if (link_target) j["link_target"] = *link_target;
    return j;
}

SandboxFs::SandboxFs(fs::path root, std::set<std::string> valid_owners)
    : root_(fs::weakly_canonical(root)), valid_owners_(std::move(valid_owners)) {
    valid_owners_.insert("root");
    fs::create_directories(root_ / "home");
}

void SandboxFs::ensure_user_home(const std::string& username) {
    std::lock_guard lock(mutex_);
    fs::create_directories(root_ / "home" / username);
    set_owner_locked("/home", "root", "root");
    set_owner_locked("/home/" + username, username, username);
}

void SandboxFs::apply_delay() const {
    // Interruptible so clearing the delay releases stragglers promptly.
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::milliseconds(delay_ms_.load());
    while (delay_ms_.load() > 0 && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

SandboxFs::Resolved SandboxFs::resolve(const std::string& principal, const std::string& path,
                                       bool follow_last) const {
    if (path.empty() || path[0] != '/') {
        throw ApiError(400, "invalid_path", "path must be absolute");
    }
    std::deque<std::string> queue;
    for (auto& c : path_components(path)) queue.push_back(c);

    std::vector<std::string> cur;
    int link_budget = 40;
    while (!queue.empty()) {
        std::string c = queue.front();
        queue.pop_front();
        if (c == ".") continue;
        if (c == "..") {
            // Clamped at the sandbox root, like a chroot.
            if (!cur.empty()) cur.pop_back();
            continue;
        }
        fs::path host = root_;
        for (const auto& seg : cur) host /= seg;
        host /= c;
        std::error_code ec;
        if (fs::is_symlink(fs::symlink_status(host, ec))) {
            if (queue.empty() && !follow_last) {
                cur.push_back(c);
                continue;
            }
            if (--link_budget <= 0) {
                throw ApiError(400, "path_unresolvable", "too many levels of symbolic links");
            }
            fs::path target = fs::read_symlink(host, ec);
            if (ec) throw ApiError(400, "path_unresolvable", "unreadable symbolic link");
            auto target_comps = path_components(target.string());
            if (target.is_absolute()) {
                // Absolute link targets are sandbox-absolute.
                cur.clear();
            }
            for (auto it = target_comps.rbegin(); it != target_comps.rend(); ++it) {
                queue.push_front(*it);
            }
            if (target.is_absolute() || target.string().empty()) continue;
            continue;
        }
        cur.push_back(c);
    }

    Resolved r;
    r.sandbox = join_sandbox(cur);
    r.host = root_;
    for (const auto& seg : cur) r.host /= seg;
    if (!under_home(r.sandbox, principal)) {
        throw ApiError(400, "sandbox_escape",
                       "path resolves outside the user's permitted sandbox");
    }
    return r;
}

void SandboxFs::set_owner_locked(const std::string& sandbox_path, const std::string& owner,
                                 const std::string& group) {
    metadata_[sandbox_path] = {owner, group};
}

std::pair<std::string, std::string> SandboxFs::owner_of_locked(
    const std::string& sandbox_path) const {
    auto it = metadata_.find(sandbox_path);
    if (it != metadata_.end()) return it->second;
    return {"root", "root"};
}

void SandboxFs::move_metadata_locked(const std::string& from, const std::string& to) {
    std::map<std::string, std::pair<std::string, std::string>> moved;
    auto it = metadata_.lower_bound(from);
    while (it != metadata_.end() && it->first.compare(0, from.size(), from) == 0) {
        if (it->first == from || it->first[from.size()] == '/') {
            moved[to + it->first.substr(from.size())] = it->second;
            it = metadata_.erase(it);
        } else {
            ++it;
        }
    }
    for (auto& [k, v] : moved) metadata_[k] = v;
}

void SandboxFs::erase_metadata_locked(const std::string& prefix) {
    auto it = metadata_.lower_bound(prefix);
    while (it != metadata_.end() && it->first.compare(0, prefix.size(), prefix) == 0) {
        if (it->first == prefix || it->first[prefix.size()] == '/') {
            it = metadata_.erase(it);
        } else {
            ++it;
        }
    }
}

DirEntry SandboxFs::entry_for_locked(const fs::path& host, const std::string& sandbox_path,
                                     const std::string& name) const {
    struct stat st {};
    if (::lstat(host.c_str(), &st) != 0) {
        throw ApiError(404, "not_found", "no such file or directory");
    }
    DirEntry e;
    e.name = name;
    if (S_ISLNK(st.st_mode)) {
        e.type = "symlink";
        std::error_code ec;
        auto target = fs::read_symlink(host, ec);
        if (!ec) e.link_target = target.string();
    } else if (S_ISDIR(st.st_mode)) {
        e.type = "directory";
    } else {
        e.type = "file";
    }
    e.size = static_cast<std::uint64_t>(st.st_size);
    e.permissions = perm_string(st.st_mode);
    auto [owner, group] = owner_of_locked(sandbox_path);
    e.owner = owner;
    e.group = group;
    e.last_modified = static_cast<std::int64_t>(st.st_mtime);
    return e;
}

std::vector<DirEntry> SandboxFs::list_dir(const std::string& principal, const std::string& path) {
    apply_delay();
    auto r = resolve(principal, path, true);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    auto status = fs::symlink_status(r.host, ec);
    if (ec || status.type() == fs::file_type::not_found) {
        throw ApiError(404, "not_found", "no such file or directory");
    }
    std::vector<DirEntry> out;
    if (fs::is_directory(status)) {
        std::vector<std::string> names;
        for (const auto& de : fs::directory_iterator(r.host)) {
            names.push_back(de.path().filename().string());
        }
        std::sort(names.begin(), names.end());
        for (const auto& name : names) {
            out.push_back(entry_for_locked(r.host / name, r.sandbox + "/" + name, name));
        }
    } else {
        out.push_back(entry_for_locked(r.host, r.sandbox, r.host.filename().string()));
    }
    return out;
}

std::string SandboxFs::file_type(const std::string& principal, const std::string& path) {
    apply_delay();
    auto r = resolve(principal, path, false);
    std::lock_guard lock(mutex_);
    struct stat st {};
    if (::lstat(r.host.c_str(), &st) != 0) {
        throw ApiError(404, "not_found", "no such file or directory");
    }
    if (S_ISLNK(st.st_mode)) {
        std::error_code ec;
        auto target = fs::read_symlink(r.host, ec);
        return "symbolic link to " + (ec ? std::string("?") : target.string());
    }
    if (S_ISDIR(st.st_mode)) return "directory";
    if (st.st_size == 0) return "empty";
    std::ifstream in(r.host, std::ios::binary);
    char buf[4096];
    in.read(buf, sizeof(buf));
    std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
        unsigned char c = static_cast<unsigned char>(buf[i]);
        if (c >= 0x80 || (c < 0x20 && c != '\n' && c != '\r' && c != '\t')) return "data";
    }
    return "ASCII text";
}

void SandboxFs::mkdir(const std::string& principal, const std::string& path, bool parents) {
    apply_delay();
    auto r = resolve(principal, path, false);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (fs::exists(fs::symlink_status(r.host, ec))) {
        if (parents && fs::is_directory(r.host)) return;  // mkdir -p is idempotent
        throw ApiError(409, "already_exists", "target already exists");
    }
    if (parents) {
        // Record ownership for every directory the chain creates.
        std::vector<std::string> comps = path_components(r.sandbox);
        fs::path host = root_;
        std::string sandbox;
        for (const auto& seg : comps) {
            host /= seg;
            sandbox += "/" + seg;
            if (!fs::exists(fs::symlink_status(host, ec))) {
                if (!fs::create_directory(host, ec) || ec) {
                    throw ApiError(500, "io_error", "cannot create directory");
                }
                set_owner_locked(sandbox, principal, principal);
            }
        }
    } else {
        if (!fs::exists(r.host.parent_path())) {
            throw ApiError(404, "not_found", "parent directory does not exist");
        }
        if (!fs::create_directory(r.host, ec) || ec) {
            throw ApiError(500, "io_error", "cannot create directory");
        }
        set_owner_locked(r.sandbox, principal, principal);
    }
}

void SandboxFs::rename(const std::string& principal, const std::string& src,
                       const std::string& dst) {
    apply_delay();
    auto rs = resolve(principal, src, false);
    auto rd = resolve(principal, dst, false);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (!fs::exists(fs::symlink_status(rs.host, ec))) {
        throw ApiError(404, "not_found", "source does not exist");
    }
    fs::rename(rs.host, rd.host, ec);
    if (ec) {
        throw ApiError(409, "rename_failed", "cannot rename: " + ec.message());
    }
    erase_metadata_locked(rd.sandbox);
    move_metadata_locked(rs.sandbox, rd.sandbox);
    if (metadata_.find(rd.sandbox) == metadata_.end()) {
        set_owner_locked(rd.sandbox, principal, principal);
    }
}

void SandboxFs::chmod(const std::string& principal, const std::string& path,
                      const std::string& mode) {
    apply_delay();
    if (mode.size() < 3 || mode.size() > 4 ||
        !std::all_of(mode.begin(), mode.end(), [](char c) { return c >= '0' && c <= '7'; })) {
        throw ApiError(400, "invalid_mode", "mode must be a 3-4 digit octal string");
    }
    auto r = resolve(principal, path, true);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (!fs::exists(fs::symlink_status(r.host, ec))) {
        throw ApiError(404, "not_found", "no such file or directory");
    }
    mode_t bits = static_cast<mode_t>(std::stoul(mode, nullptr, 8));
    if (::chmod(r.host.c_str(), bits) != 0) {
        throw ApiError(500, "io_error", "chmod failed");
    }
}

void SandboxFs::chown(const std::string& principal, const std::string& path,
                      const std::optional<std::string>& owner,
                      const std::optional<std::string>& group) {
    apply_delay();
    if (!owner && !group) {
        throw ApiError(400, "missing_argument", "chown requires an owner and/or group");
    }
    for (const auto& name : {owner, group}) {
        if (name && valid_owners_.find(*name) == valid_owners_.end()) {
            throw ApiError(400, "unknown_owner", "unknown owner or group name");
        }
    }
    auto r = resolve(principal, path, true);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (!fs::exists(fs::symlink_status(r.host, ec))) {
        throw ApiError(404, "not_found", "no such file or directory");
    }
    auto [cur_owner, cur_group] = owner_of_locked(r.sandbox);
    set_owner_locked(r.sandbox, owner.value_or(cur_owner), group.value_or(cur_group));
}

void SandboxFs::symlink(const std::string& principal, const std::string& target,
                        const std::string& link_path) {
    apply_delay();
    auto r = resolve(principal, link_path, false);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (fs::exists(fs::symlink_status(r.host, ec))) {
        throw ApiError(409, "already_exists", "link path already exists");
    }
    if (!fs::exists(r.host.parent_path())) {
        throw ApiError(404, "not_found", "parent directory does not exist");
    }
    // Dangling targets are allowed; resolution confines them later.
    if (::symlink(target.c_str(), r.host.c_str()) != 0) {
        throw ApiError(500, "io_error", "symlink failed");
    }
    set_owner_locked(r.sandbox, principal, principal);
}

void SandboxFs::write_file(const std::string& principal, const std::string& path,
                           const std::string& bytes, bool create_parents) {
    apply_delay();
    auto r = resolve(principal, path, true);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (!fs::exists(r.host.parent_path())) {
        if (!create_parents) {
            throw ApiError(404, "not_found", "parent directory does not exist");
        }
        auto parent_sandbox = r.sandbox.substr(0, r.sandbox.rfind('/'));
        std::vector<std::string> comps = path_components(parent_sandbox);
        fs::path host = root_;
        std::string sandbox;
        for (const auto& seg : comps) {
            host /= seg;
            sandbox += "/" + seg;
            if (!fs::exists(fs::symlink_status(host, ec))) {
                fs::create_directory(host, ec);
                set_owner_locked(sandbox, principal, principal);
            }
        }
    }
    std::ofstream out(r.host, std::ios::binary | std::ios::trunc);
    if (!out) throw ApiError(500, "io_error", "cannot open file for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw ApiError(500, "io_error", "short write");
    if (metadata_.find(r.sandbox) == metadata_.end()) {
        set_owner_locked(r.sandbox, principal, principal);
    }
}

std::string SandboxFs::read_file(const std::string& principal, const std::string& path) {
    apply_delay();
    auto r = resolve(principal, path, true);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    auto status = fs::symlink_status(r.host, ec);
    if (ec || status.type() == fs::file_type::not_found) {
        throw ApiError(404, "not_found", "no such file or directory");
    }
    if (fs::is_directory(status)) {
        throw ApiError(400, "is_directory", "path is a directory");
    }
    std::ifstream in(r.host, std::ios::binary);
    if (!in) throw ApiError(500, "io_error", "cannot open file");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void SandboxFs::remove_recursive(const std::string& principal, const std::string& path) {
    apply_delay();
    auto r = resolve(principal, path, false);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    auto status = fs::symlink_status(r.host, ec);
    if (ec || status.type() == fs::file_type::not_found) {
        throw ApiError(404, "not_found", "no such file or directory");
    }
    fs::remove_all(r.host, ec);
    if (ec) throw ApiError(500, "io_error", "remove failed: " + ec.message());
    erase_metadata_locked(r.sandbox);
}

void SandboxFs::copy_recursive(const std::string& principal, const std::string& src,
                               const std::string& dst) {
    apply_delay();
    auto rs = resolve(principal, src, true);
    auto rd = resolve(principal, dst, false);
    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (!fs::exists(fs::symlink_status(rs.host, ec))) {
        throw ApiError(404, "not_found", "source does not exist");
    }
    fs::copy(rs.host, rd.host,
             fs::copy_options::recursive | fs::copy_options::copy_symlinks |
                 fs::copy_options::overwrite_existing,
             ec);
    if (ec) throw ApiError(500, "io_error", "copy failed: " + ec.message());
    set_owner_locked(rd.sandbox, principal, principal);
    for (auto it = fs::recursive_directory_iterator(rd.host, ec);
         !ec && it != fs::recursive_directory_iterator(); ++it) {
        auto rel = fs::relative(it->path(), root_, ec).string();
        if (!ec) set_owner_locked("/" + rel, principal, principal);
    }
}

bool SandboxFs::exists(const std::string& principal, const std::string& path) {
    auto r = resolve(principal, path, true);
    std::error_code ec;
    return fs::exists(fs::symlink_status(r.host, ec));
}

void SandboxFs::validate_path(const std::string& principal, const std::string& path) {
    resolve(principal, path, true);
}

bool SandboxFs::ping() const {
    if (!available_.load()) return false;
    std::error_code ec;
    return fs::is_directory(root_, ec);
}

}  // namespace firecrest::machine
