#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace firecrest::machine {

struct DirEntry {
    std::string name;
    std::string type;  // "file" | "directory" | "symlink"
    std::uint64_t size = 0;
    std::string permissions;  // "rwxr-xr-x"
    std::string owner;
    std::string group;
    std::int64_t last_modified = 0;
    std::optional<std::string> link_target;

    nlohmann::json to_json() const;
};

// Rooted directory tree standing in for one machine's filesystem. Every path
// a caller supplies is sandbox-absolute ("/home/alice/..."); resolution walks
// component by component, clamps ".." at the root, follows symlinks inside
// the root only, and finally requires the result to live under the acting
// user's home. Ownership is sidecar metadata, not OS uid/gid, so tests run
// unprivileged.
class SandboxFs {
public:
    SandboxFs(std::filesystem::path root, std::set<std::string> valid_owners);

    void ensure_user_home(const std::string& username);

    std::vector<DirEntry> list_dir(const std::string& principal, const std::string& path);
    std::string file_type(const std::string& principal, const std::string& path);
    void mkdir(const std::string& principal, const std::string& path, bool parents);
    void rename(const std::string& principal, const std::string& src, const std::string& dst);
    void chmod(const std::string& principal, const std::string& path, const std::string& mode);
    void chown(const std::string& principal, const std::string& path,
               const std::optional<std::string>& owner, const std::optional<std::string>& group);
    void symlink(const std::string& principal, const std::string& target,
                 const std::string& link_path);
    void write_file(const std::string& principal, const std::string& path,
                    const std::string& bytes, bool create_parents);
    std::string read_file(const std::string& principal, const std::string& path);
    void remove_recursive(const std::string& principal, const std::string& path);
    void copy_recursive(const std::string& principal, const std::string& src,
                        const std::string& dst);
    bool exists(const std::string& principal, const std::string& path);

    // Throws on escape; tolerates nonexistent targets. Sync precondition
    // check for the storage pipelines.
    void validate_path(const std::string& principal, const std::string& path);

    const std::filesystem::path& root() const { return root_; }

    bool ping() const;
    void set_available(bool v) { available_ = v; }
    // Test hook: per-operation artificial latency.
    void set_delay_ms(int ms) { delay_ms_ = ms; }

private:
    struct Resolved {
        std::filesystem::path host;
        std::string sandbox;
    };

    Resolved resolve(const std::string& principal, const std::string& path,
                     bool follow_last) const;
    void set_owner_locked(const std::string& sandbox_path, const std::string& owner,
                          const std::string& group);
    std::pair<std::string, std::string> owner_of_locked(const std::string& sandbox_path) const;
    void move_metadata_locked(const std::string& from, const std::string& to);
    void erase_metadata_locked(const std::string& prefix);
    DirEntry entry_for_locked(const std::filesystem::path& host, const std::string& sandbox_path,
                              const std::string& name) const;
    void apply_delay() const;

    std::filesystem::path root_;
    std::set<std::string> valid_owners_;
    mutable std::mutex mutex_;
    std::map<std::string, std::pair<std::string, std::string>> metadata_;  // path -> owner,group
    std::atomic<bool> available_{true};
    std::atomic<int> delay_ms_{0};
};

}  // namespace firecrest::machine
