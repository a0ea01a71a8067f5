#include "profcat/result_xml.hpp"

#include "profcat/error.hpp"

#include <algorithm>
#include <charconv>

namespace profcat {

ResultDocument::ResultDocument(const RankedAssignment& ranked)
    : doc_id_(ranked.doc_id), automatic_(ranked.entries)
{
}

bool ResultDocument::contains(const std::string& code) const
{
    if (std::find(added_.begin(), added_.end(), code) != added_.end())
        return true;
    bool automatic = std::any_of(automatic_.begin(), automatic_.end(), [&](const auto& e) { return e.code == code; });
    return automatic && std::find(deleted_.begin(), deleted_.end(), code) == deleted_.end();
}

void ResultDocument::add(const std::string& code)
{
    if (contains(code))
        throw Error("descriptor " + code + " is already assigned to " + doc_id_);
    saved_ = false;
    auto del = std::find(deleted_.begin(), deleted_.end(), code);
    if (del != deleted_.end()) {
        deleted_.erase(del);
        return;
    }
    added_.push_back(code);
}

void ResultDocument::remove(const std::string& code)
{
    if (!contains(code))
        throw NotFoundError("descriptor " + code + " is not assigned to " + doc_id_);
    saved_ = false;
    auto add = std::find(added_.begin(), added_.end(), code);
    if (add != added_.end()) {
        added_.erase(add);
        return;
    }
    deleted_.push_back(code);
}

std::vector<ResultEntry> ResultDocument::entries() const
{
    std::vector<ResultEntry> out;
    for (const auto& e : automatic_)
        if (std::find(deleted_.begin(), deleted_.end(), e.code) == deleted_.end())
            out.push_back({e.code, e.weight, false});
    for (const auto& code : added_)
        out.push_back({code, std::nullopt, true});
    return out;
}

std::string format_weight(double w)
{
    char buf[512]; // room for the longest fixed-notation double below 1
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, w, std::chars_format::fixed);
    return std::string(buf, end);
}

std::string xml_escape(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string format_document_block(const std::string& doc_id, const std::vector<ResultEntry>& entries)
{
    std::string out = "<EuroVoc documentId=\"" + xml_escape(doc_id) + "\">";
    for (const auto& e : entries) {
        out += "<category code=\"" + xml_escape(e.code) + "\"";
        if (e.weight)
            out += " weight=\"" + format_weight(*e.weight) + "\"";
        if (e.manual)
            out += " manual=\"true\"";
        out += "></category>";
    }
    out += "</EuroVoc>";
    return out;
}

std::string format_result_xml(const std::vector<ResultDocument>& docs)
{
    std::string out = "<result>";
    for (const auto& d : docs) {
        out += format_document_block(d.doc_id(), d.entries());
        out += '\n';
    }
    out += "</result>\n";
    return out;
}

std::string format_result_xml(const std::vector<RankedAssignment>& docs)
{
    std::vector<ResultDocument> wrapped;
    wrapped.reserve(docs.size());
    for (const auto& d : docs)
        wrapped.emplace_back(d);
    return format_result_xml(wrapped);
}

std::string insert_block_into_xml(std::string_view xml, std::string_view block)
{
    auto close = xml.rfind("</");
    if (close == std::string_view::npos)
        throw ParseError("input XML has no closing root tag to insert the result into");
    std::string out(xml.substr(0, close));
    out += block;
    out += xml.substr(close);
    return out;
}

} // namespace profcat
