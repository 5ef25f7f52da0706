#include "ecgauth/store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ecgauth/errors.hpp"

namespace ecgauth {

namespace {

using nlohmann::json;

json to_json(const Template& t) {
    return json{{"v", 1},
                {"subject", t.subject_id},
                {"fingerprint",
                 {{"n", t.features.fingerprint.n_resample},
                  {"m", t.features.fingerprint.m_coeffs},
                  {"pv", t.features.fingerprint.pipeline_version}}},
                {"coeffs", t.features.coeffs},
                {"enrolled_at", t.enrolled_at},
                {"source", t.source_record}};
}

Template from_json(const json& j) {
    Template t;
    if (j.at("v").get<int>() != 1)
        throw Error(Errc::corrupt_store, "unsupported record version");
    t.subject_id = j.at("subject").get<std::string>();
    const json& fp = j.at("fingerprint");
    t.features.fingerprint.n_resample = fp.at("n").get<std::uint32_t>();
    t.features.fingerprint.m_coeffs = fp.at("m").get<std::uint32_t>();
    t.features.fingerprint.pipeline_version = fp.at("pv").get<std::uint16_t>();
    t.features.coeffs = j.at("coeffs").get<std::vector<double>>();
    t.enrolled_at = j.at("enrolled_at").get<std::int64_t>();
    t.source_record = j.at("source").get<std::string>();
    validate_subject_id(t.subject_id);
    if (t.features.coeffs.size() != t.features.fingerprint.m_coeffs)
        throw Error(Errc::corrupt_store, "coefficient count disagrees with fingerprint");
    return t;
}

} // namespace

TemplateStore::TemplateStore(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in)
        return; // missing file: empty store, created on first put

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            Template t = from_json(json::parse(line));
            templates_[t.subject_id] = std::move(t);
        } catch (const Error& e) {
            throw Error(Errc::corrupt_store,
                        "line " + std::to_string(line_no) + ": " + e.what(), line_no);
        } catch (const std::exception& e) {
            throw Error(Errc::corrupt_store,
                        "line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
}

void TemplateStore::save() const {
    const std::filesystem::path tmp = path_.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(Errc::io_error, "cannot write store temp file: " + tmp.string());
        for (const auto& [id, t] : templates_)
            out << to_json(t).dump() << '\n';
        out.flush();
        if (!out)
            throw Error(Errc::io_error, "short write to store temp file: " + tmp.string());
    }
    if (pre_rename_hook_)
        pre_rename_hook_();
    std::error_code ec;
    std::filesystem::rename(tmp, path_, ec);
    if (ec)
        throw Error(Errc::io_error, "cannot replace store file: " + ec.message());
}

void TemplateStore::put(const Template& tmpl, bool force) {
    validate_subject_id(tmpl.subject_id);
    auto it = templates_.find(tmpl.subject_id);
    if (it != templates_.end() && !force)
        throw Error(Errc::duplicate_subject, "subject already enrolled: " + tmpl.subject_id);

    std::optional<Template> previous;
    if (it != templates_.end())
        previous = it->second;
    templates_[tmpl.subject_id] = tmpl;
    try {
        save();
    } catch (...) {
        // Keep the in-memory view consistent with the (unchanged) file.
        if (previous)
            templates_[tmpl.subject_id] = std::move(*previous);
        else
            templates_.erase(tmpl.subject_id);
        throw;
    }
}

std::optional<Template> TemplateStore::get(const std::string& subject_id) const {
    auto it = templates_.find(subject_id);
    if (it == templates_.end())
        return std::nullopt;
    return it->second;
}

std::vector<std::string> TemplateStore::list() const {
    std::vector<std::string> ids;
    ids.reserve(templates_.size());
    for (const auto& [id, t] : templates_)
        ids.push_back(id);
    return ids; // std::map iterates in sorted order
}

std::vector<Template> TemplateStore::all() const {
    std::vector<Template> out;
    out.reserve(templates_.size());
    for (const auto& [id, t] : templates_)
        out.push_back(t);
    return out;
}

} // namespace ecgauth
