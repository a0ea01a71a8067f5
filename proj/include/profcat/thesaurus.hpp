#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace profcat {

struct Descriptor {
    std::string code;
    std::map<std::string, std::string> labels; // language code -> label
    std::vector<std::string> broader;
    std::vector<std::string> narrower;
    std::vector<std::string> related;
    std::string field_id;

    // Label in `lang`, falling back to the code.
    const std::string& display(std::string_view lang) const;

    bool operator==(const Descriptor&) const = default;
};

struct Neighborhood {
    std::vector<const Descriptor*> broader;
    std::vector<const Descriptor*> narrower;
    std::vector<const Descriptor*> related;
    std::string field;
};

// Immutable after construction. Link lists are kept sorted and symmetric.
class Thesaurus {
public:
    Thesaurus() = default;

    // Validates references and acyclicity, and symmetrises links. One
    // warning per repaired link is appended to `warnings` when given.
    // Throws IntegrityError.
    Thesaurus(std::map<std::string, Descriptor> descriptors,
              std::map<std::string, std::string> fields,
              std::vector<std::string>* warnings = nullptr);

    const std::map<std::string, Descriptor>& descriptors() const noexcept { return descriptors_; }
    const std::map<std::string, std::string>& fields() const noexcept { return fields_; }
    std::size_t size() const noexcept { return descriptors_.size(); }

    const Descriptor* find(std::string_view code) const;
    bool contains(std::string_view code) const { return find(code) != nullptr; }
    bool has_language(std::string_view lang) const;

    // Descriptors whose label in `lang` contains `query`, case-insensitively,
    // ordered by (match position, code). Unknown language gives an empty list.
    std::vector<const Descriptor*> search(std::string_view query, std::string_view lang) const;

    // Throws NotFoundError for an unknown code.
    Neighborhood neighborhood(std::string_view code) const;

    bool operator==(const Thesaurus&) const = default;

private:
    std::map<std::string, Descriptor> descriptors_;
    std::map<std::string, std::string> fields_;
};

// Thesaurus text format: see docs/formats.md.
Thesaurus parse_thesaurus(std::string_view text, std::vector<std::string>* warnings = nullptr);
Thesaurus load_thesaurus(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
std::string format_thesaurus(const Thesaurus& t);
void write_thesaurus(const Thesaurus& t, const std::filesystem::path& path);

} // namespace profcat
