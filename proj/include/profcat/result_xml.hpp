#pragma once

#include "profcat/indexer.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace profcat {

struct ResultEntry {
    std::string code;
    std::optional<double> weight; // empty for manual additions
    bool manual = false;
};

// The reviewable result for one document: the automatic ranking plus the
// amendments made on top of it.
class ResultDocument {
public:
    ResultDocument() = default;
    explicit ResultDocument(const RankedAssignment& ranked);

    const std::string& doc_id() const noexcept { return doc_id_; }
    const std::vector<RankEntry>& automatic() const noexcept { return automatic_; }
    const std::vector<std::string>& added() const noexcept { return added_; }
    const std::vector<std::string>& deleted() const noexcept { return deleted_; }
    bool saved() const noexcept { return saved_; }
    void mark_saved() noexcept { saved_ = true; }

    // Adding a deleted automatic code restores it. Throws Error when the code
    // is already present.
    void add(const std::string& code);
    // Throws NotFoundError when the code is not present.
    void remove(const std::string& code);
    bool contains(const std::string& code) const;

    // Surviving automatic entries in rank order, then manual additions in
    // the order they were made.
    std::vector<ResultEntry> entries() const;

private:
    std::string doc_id_;
    std::vector<RankEntry> automatic_;
    std::vector<std::string> added_;
    std::vector<std::string> deleted_;
    bool saved_ = false;
};

// Shortest decimal string that parses back to the same double.
std::string format_weight(double w);
std::string xml_escape(std::string_view s);

// <EuroVoc documentId="..."><category code=".." weight=".."></category>...</EuroVoc>
std::string format_document_block(const std::string& doc_id, const std::vector<ResultEntry>& entries);
// <result>block\n block\n ...</result>\n
std::string format_result_xml(const std::vector<ResultDocument>& docs);
std::string format_result_xml(const std::vector<RankedAssignment>& docs);

// Inserts `block` as the last child of the root element of `xml`. Throws
// ParseError when no closing root tag is found.
std::string insert_block_into_xml(std::string_view xml, std::string_view block);

} // namespace profcat
