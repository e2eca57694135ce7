#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mkdv {

/// Error tied to one configuration key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Flat `key = value` text. '#' starts a comment; blank lines are ignored;
/// later duplicates override earlier ones.
class Config {
public:
    Config() = default;

    static Config parse(std::istream& in);
    static Config parse_string(const std::string& text);
    /// Throws std::runtime_error if the file cannot be opened.
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    /// Accepts "inf" / "infinity" for +infinity.
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list; empty value gives an empty list.
    std::vector<std::string> get_list(const std::string& key) const;

    /// Throws ConfigError on the first key not in `allowed`.
    void require_known(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
    /// Sorted "key=value\n" lines.
    std::string canonical() const;
    /// FNV-1a 64 of canonical().
    std::uint64_t hash() const;

private:
    std::map<std::string, std::string> entries_;
};

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

} // namespace mkdv
