#include "profcat/thesaurus.hpp"

#include "profcat/error.hpp"
#include "profcat/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace profcat {

namespace {

void sort_unique(std::vector<std::string>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool sorted_contains(const std::vector<std::string>& v, const std::string& x)
{
    return std::binary_search(v.begin(), v.end(), x);
}

std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

const std::string& Descriptor::display(std::string_view lang) const
{
    auto it = labels.find(std::string(lang));
    return it == labels.end() ? code : it->second;
}

Thesaurus::Thesaurus(std::map<std::string, Descriptor> descriptors,
                     std::map<std::string, std::string> fields,
                     std::vector<std::string>* warnings)
    : descriptors_(std::move(descriptors)), fields_(std::move(fields))
{
    for (auto& [code, d] : descriptors_) {
        if (code.empty())
            throw IntegrityError("descriptor with empty code");
        if (d.code != code)
            throw IntegrityError("descriptor key '" + code + "' does not match its code '" + d.code + "'");
        sort_unique(d.broader);
        sort_unique(d.narrower);
        sort_unique(d.related);
        for (const auto* links : {&d.broader, &d.narrower, &d.related}) {
            for (const auto& target : *links) {
                if (!descriptors_.contains(target))
                    throw IntegrityError("descriptor " + code + " references unknown descriptor " + target);
                if (target == code)
                    throw IntegrityError("descriptor " + code + " links to itself");
            }
        }
        if (!d.field_id.empty() && !fields_.contains(d.field_id))
            throw IntegrityError("descriptor " + code + " references unknown field " + d.field_id);
    }

    // Symmetrise. Collect first, then apply, so that iteration sees the
    // links exactly as loaded.
    struct Repair {
        std::string target;
        std::string source;
        int kind; // 0 = narrower, 1 = broader, 2 = related
    };
    std::vector<Repair> repairs;
    for (const auto& [code, d] : descriptors_) {
        for (const auto& b : d.broader)
            if (!sorted_contains(descriptors_.at(b).narrower, code))
                repairs.push_back({b, code, 0});
        for (const auto& n : d.narrower)
            if (!sorted_contains(descriptors_.at(n).broader, code))
                repairs.push_back({n, code, 1});
        for (const auto& r : d.related)
            if (!sorted_contains(descriptors_.at(r).related, code))
                repairs.push_back({r, code, 2});
    }
    static constexpr const char* kind_names[] = {"narrower", "broader", "related"};
    for (const auto& r : repairs) {
        auto& target = descriptors_.at(r.target);
        auto& list = r.kind == 0 ? target.narrower : r.kind == 1 ? target.broader : target.related;
        list.push_back(r.source);
        if (warnings)
            warnings->push_back("repaired link: added " + r.source + " to " + kind_names[r.kind] + " of " + r.target);
    }
    for (auto& [_, d] : descriptors_) {
        sort_unique(d.broader);
        sort_unique(d.narrower);
        sort_unique(d.related);
    }

    // Acyclicity of the broader relation: iterative three-colour DFS.
    std::map<std::string_view, int> colour;
    for (const auto& [start, _] : descriptors_) {
        if (colour[start] != 0)
            continue;
        std::vector<std::pair<std::string_view, std::size_t>> stack{{start, 0}};
        colour[start] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const auto& up = descriptors_.at(std::string(node)).broader;
            if (next == up.size()) {
                colour[node] = 2;
                stack.pop_back();
                continue;
            }
            std::string_view parent = up[next++];
            int c = colour[parent];
            if (c == 1)
                throw IntegrityError("hierarchy cycle through descriptor " + std::string(parent));
            if (c == 0) {
                colour[parent] = 1;
                stack.emplace_back(parent, 0);
            }
        }
    }
}

const Descriptor* Thesaurus::find(std::string_view code) const
{
    auto it = descriptors_.find(std::string(code));
    return it == descriptors_.end() ? nullptr : &it->second;
}

bool Thesaurus::has_language(std::string_view lang) const
{
    std::string key(lang);
    return std::any_of(descriptors_.begin(), descriptors_.end(),
                       [&](const auto& kv) { return kv.second.labels.contains(key); });
}

std::vector<const Descriptor*> Thesaurus::search(std::string_view query, std::string_view lang) const
{
    if (!has_language(lang))
        return {};
    std::string needle = fold_case(query);
    std::vector<std::pair<std::size_t, const Descriptor*>> hits;
    for (const auto& [code, d] : descriptors_) {
        auto pos = fold_case(d.display(lang)).find(needle);
        if (pos != std::string::npos)
            hits.emplace_back(pos, &d);
    }
    // descriptors_ is code-ordered, so a stable sort on position keeps code order.
    std::stable_sort(hits.begin(), hits.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<const Descriptor*> out;
    out.reserve(hits.size());
    for (auto& [_, d] : hits)
        out.push_back(d);
    return out;
}

Neighborhood Thesaurus::neighborhood(std::string_view code) const
{
    const Descriptor* d = find(code);
    if (!d)
        throw NotFoundError("unknown descriptor " + std::string(code));
    Neighborhood n;
    auto resolve = [this](const std::vector<std::string>& codes) {
        std::vector<const Descriptor*> out;
        for (const auto& c : codes)
            out.push_back(&descriptors_.at(c));
        return out;
    };
    n.broader = resolve(d->broader);
    n.narrower = resolve(d->narrower);
    n.related = resolve(d->related);
    if (!d->field_id.empty())
        n.field = fields_.at(d->field_id);
    return n;
}

Thesaurus parse_thesaurus(std::string_view text, std::vector<std::string>* warnings)
{
    std::map<std::string, Descriptor> descriptors;
    std::map<std::string, std::string> fields;

    enum class Block { none, field, descriptor } block = Block::none;
    std::string current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("thesaurus line " + std::to_string(line_no) + ": " + msg);
    };

    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;

        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            auto words = split_words(line);
            if (words.size() != 2)
                fail("expected 'descriptor <code>', 'field <id>' or 'key = value'");
            current = words[1];
            if (words[0] == "descriptor") {
                block = Block::descriptor;
                if (descriptors.contains(current))
                    fail("duplicate descriptor " + current);
                descriptors[current].code = current;
            } else if (words[0] == "field") {
                block = Block::field;
                if (fields.contains(current))
                    fail("duplicate field " + current);
                fields[current] = current;
            } else {
                fail("unknown record type '" + words[0] + "'");
            }
            continue;
        }

        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (block == Block::none)
            fail("key outside of a record");
        if (block == Block::field) {
            if (key != "label")
                fail("unknown field key '" + key + "'");
            fields[current] = std::string(value);
            continue;
        }
        Descriptor& d = descriptors[current];
        if (key.starts_with("label.") && key.size() > 6) {
            d.labels[key.substr(6)] = std::string(value);
        } else if (key == "broader") {
            for (auto& w : split_words(value))
                d.broader.push_back(std::move(w));
        } else if (key == "narrower") {
            for (auto& w : split_words(value))
                d.narrower.push_back(std::move(w));
        } else if (key == "related") {
            for (auto& w : split_words(value))
                d.related.push_back(std::move(w));
        } else if (key == "field") {
            d.field_id = std::string(value);
        } else {
            fail("unknown descriptor key '" + key + "'");
        }
    }
    return Thesaurus(std::move(descriptors), std::move(fields), warnings);
}

Thesaurus load_thesaurus(const std::filesystem::path& path, std::vector<std::string>* warnings)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open thesaurus " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_thesaurus(ss.str(), warnings);
}

std::string format_thesaurus(const Thesaurus& t)
{
    std::ostringstream out;
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) {
            if (!s.empty())
                s += ' ';
            s += x;
        }
        return s;
    };
    for (const auto& [id, label] : t.fields())
        out << "field " << id << "\nlabel = " << label << "\n\n";
    for (const auto& [code, d] : t.descriptors()) {
        out << "descriptor " << code << '\n';
        for (const auto& [lang, label] : d.labels)
            out << "label." << lang << " = " << label << '\n';
        if (!d.broader.empty())
            out << "broader = " << join(d.broader) << '\n';
        if (!d.narrower.empty())
            out << "narrower = " << join(d.narrower) << '\n';
        if (!d.related.empty())
            out << "related = " << join(d.related) << '\n';
        if (!d.field_id.empty())
            out << "field = " << d.field_id << '\n';
        out << '\n';
    }
    return out.str();
}

void write_thesaurus(const Thesaurus& t, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write thesaurus " + path.string());
    out << format_thesaurus(t);
}

} // namespace profcat
