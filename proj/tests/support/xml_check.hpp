#pragma once

// A small non-validating XML reader for tests, plus a structural check of
// result files against the rules in schema/result.xsd. Errors come back as
// strings; an empty string means the document passed.

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace profcat::testing {

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct XmlNode {
    std::string name;
    std::map<std::string, std::string> attributes;
    std::vector<std::unique_ptr<XmlNode>> children;
    std::string text;
};

class XmlReader {
public:
    explicit XmlReader(std::string_view s) : s_(s) {}

    // Parses the whole document; returns nullptr and sets error() on failure.
    std::unique_ptr<XmlNode> parse()
    {
        skip_misc();
        if (pos_ >= s_.size() || s_[pos_] != '<')
            return fail("no root element");
        auto root = element();
        if (!root)
            return nullptr;
        skip_misc();
        if (pos_ != s_.size())
            return fail("content after the root element");
        return root;
    }

    const std::string& error() const { return error_; }

private:
    std::unique_ptr<XmlNode> fail(std::string msg)
    {
        if (error_.empty())
            error_ = msg + " at offset " + std::to_string(pos_);
        return nullptr;
    }

    static bool name_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' || c == '.';
    }

    void skip_space()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    // Whitespace, comments and processing instructions outside the root.
    void skip_misc()
    {
        for (;;) {
            skip_space();
            if (s_.substr(pos_).starts_with("<?")) {
                auto end = s_.find("?>", pos_);
                pos_ = end == std::string_view::npos ? s_.size() : end + 2;
            } else if (s_.substr(pos_).starts_with("<!--")) {
                auto end = s_.find("-->", pos_);
                pos_ = end == std::string_view::npos ? s_.size() : end + 3;
            } else {
                return;
            }
        }
    }

    std::string name()
    {
        auto start = pos_;
        while (pos_ < s_.size() && name_char(s_[pos_]))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    bool decode(std::string_view raw, std::string& out)
    {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '<')
                return false;
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos)
                return false;
            auto ent = raw.substr(i + 1, semi - i - 1);
            static const std::map<std::string_view, char> named{
                {"lt", '<'}, {"gt", '>'}, {"amp", '&'}, {"quot", '"'}, {"apos", '\''}};
            if (auto it = named.find(ent); it != named.end())
                out += it->second;
            else if (ent.size() > 1 && ent[0] == '#')
                out += '?';
            else
                return false;
            i = semi;
        }
        return true;
    }

    std::unique_ptr<XmlNode> element()
    {
        ++pos_; // '<'
        auto node = std::make_unique<XmlNode>();
        node->name = name();
        if (node->name.empty())
            return fail("missing element name");
        for (;;) {
            skip_space();
            if (pos_ >= s_.size())
                return fail("unterminated start tag");
            if (s_.substr(pos_).starts_with("/>")) {
                pos_ += 2;
                return node;
            }
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            auto attr = name();
            if (attr.empty())
                return fail("bad attribute");
            skip_space();
            if (pos_ >= s_.size() || s_[pos_] != '=')
                return fail("expected '='");
            ++pos_;
            skip_space();
            if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\''))
                return fail("unquoted attribute value");
            char q = s_[pos_++];
            auto end = s_.find(q, pos_);
            if (end == std::string_view::npos)
                return fail("unterminated attribute value");
            std::string value;
            if (!decode(s_.substr(pos_, end - pos_), value))
                return fail("bad character or entity in attribute");
            pos_ = end + 1;
            if (!node->attributes.emplace(attr, value).second)
                return fail("duplicate attribute " + attr);
        }
        for (;;) {
            auto lt = s_.find('<', pos_);
            if (lt == std::string_view::npos)
                return fail("unclosed element " + node->name);
            if (!decode(s_.substr(pos_, lt - pos_), node->text))
                return fail("bad entity in text");
            pos_ = lt;
            if (s_.substr(pos_).starts_with("</")) {
                pos_ += 2;
                if (name() != node->name)
                    return fail("mismatched closing tag for " + node->name);
                skip_space();
                if (pos_ >= s_.size() || s_[pos_] != '>')
                    return fail("bad closing tag");
                ++pos_;
                return node;
            }
            if (s_.substr(pos_).starts_with("<!--")) {
                auto end = s_.find("-->", pos_);
                if (end == std::string_view::npos)
                    return fail("unterminated comment");
                pos_ = end + 3;
                continue;
            }
            auto child = element();
            if (!child)
                return nullptr;
            node->children.push_back(std::move(child));
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::string error_;
};

inline std::string well_formed(std::string_view xml)
{
    XmlReader r(xml);
    return r.parse() ? std::string{} : r.error();
}

inline bool blank(const std::string& s)
{
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

// Structure of a result file: <result> holding <EuroVoc documentId> blocks,
// each holding <category code [weight in 0..1] [manual=true|false]>.
inline std::string check_result_xml(std::string_view xml)
{
    XmlReader r(xml);
    auto root = r.parse();
    if (!root)
        return r.error();
    if (root->name != "result" || !root->attributes.empty() || !blank(root->text))
        return "root must be a bare <result>";
    for (const auto& doc : root->children) {
        if (doc->name != "EuroVoc")
            return "unexpected element " + doc->name;
        if (doc->attributes.size() != 1 || !doc->attributes.contains("documentId"))
            return "EuroVoc needs exactly a documentId attribute";
        if (!blank(doc->text))
            return "text inside EuroVoc";
        for (const auto& cat : doc->children) {
            if (cat->name != "category" || !cat->children.empty() || !cat->text.empty())
                return "EuroVoc may only hold empty category elements";
            if (!cat->attributes.contains("code"))
                return "category without code";
            for (const auto& [k, v] : cat->attributes) {
                if (k == "code")
                    continue;
                if (k == "weight") {
                    double w = -1;
                    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), w);
                    if (ec != std::errc() || end != v.data() + v.size() || w < 0.0 || w > 1.0)
                        return "bad weight " + v;
                } else if (k == "manual") {
                    if (v != "true" && v != "false")
                        return "bad manual flag " + v;
                } else {
                    return "unexpected attribute " + k;
                }
            }
        }
    }
    return {};
}

} // namespace profcat::testing
