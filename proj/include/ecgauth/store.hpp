#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecgauth/authflow.hpp"

namespace ecgauth {

/// Durable template database over a JSON-lines file: one template per line,
/// {"v":1,"subject":...,"fingerprint":{"n":..,"m":..,"pv":..},"coeffs":[..],
///  "enrolled_at":...,"source":...}, UTF-8, LF endings. Mutations rewrite the
/// whole file atomically (temp file + rename), so an interrupted write never
/// leaves a partial store behind.
///
/// Single writer, multiple readers per instance; callers serialize mutations.
class TemplateStore {
public:
    /// Load all records from `path`; a missing file yields an empty store
    /// (the file appears on first put). Throws Error(corrupt_store) with the
    /// 1-based line number of the first bad line.
    explicit TemplateStore(std::filesystem::path path);

    /// Insert a template. An existing subject_id is an error unless `force`,
    /// which replaces it. Persists before returning.
    void put(const Template& tmpl, bool force = false);

    std::optional<Template> get(const std::string& subject_id) const;

    /// All subject ids, lexicographically sorted.
    std::vector<std::string> list() const;

    std::vector<Template> all() const;

    std::size_t size() const { return templates_.size(); }
    const std::filesystem::path& path() const { return path_; }

    /// Test hook, invoked after the temp file is written and before the
    /// rename. A hook that throws simulates a crash between the two steps.
    void set_pre_rename_hook(std::function<void()> hook) { pre_rename_hook_ = std::move(hook); }

private:
    void save() const;

    std::filesystem::path path_;
    std::map<std::string, Template> templates_;
    std::function<void()> pre_rename_hook_;
};

} // namespace ecgauth
