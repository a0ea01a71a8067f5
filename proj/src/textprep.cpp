#include "profcat/textprep.hpp"

#include "profcat/error.hpp"
#include "profcat/hash.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace profcat {

namespace {

void append_utf8(std::string& out, UChar32 cp)
{
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    U8_APPEND_UNSAFE(buf, len, cp);
    out.append(buf, static_cast<std::size_t>(len));
}

// Decodes the code point at `pos` and advances it. Returns a negative value
// for an ill-formed sequence (pos still advances past it).
UChar32 next_code_point(std::string_view s, std::size_t& pos)
{
    const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = static_cast<int32_t>(pos);
    UChar32 cp = 0;
    U8_NEXT(bytes, i, static_cast<int32_t>(s.size()), cp);
    pos = static_cast<std::size_t>(i);
    return cp;
}

void validate_utf8(std::string_view s)
{
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t at = pos;
        if (next_code_point(s, pos) < 0)
            throw ParseError("invalid UTF-8 at byte offset " + std::to_string(at));
    }
}

bool is_space(char ch)
{
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
}

std::string_view strip_bom(std::string_view s)
{
    if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF")
        s.remove_prefix(3);
    return s;
}

// Returns the decoded entity and the number of bytes consumed, or 0 when the
// text at `pos` is not a recognised entity.
std::size_t decode_entity(std::string_view s, std::size_t pos, std::string& out)
{
    auto semi = s.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 12)
        return 0;
    std::string_view name = s.substr(pos + 1, semi - pos - 1);
    static constexpr std::array<std::pair<std::string_view, char>, 5> named{{
        {"lt", '<'}, {"gt", '>'}, {"amp", '&'}, {"quot", '"'}, {"apos", '\''},
    }};
    for (auto [key, ch] : named) {
        if (name == key) {
            out.push_back(ch);
            return semi - pos + 1;
        }
    }
    if (name.size() >= 2 && name[0] == '#') {
        int base = 10;
        std::string_view digits = name.substr(1);
        if (digits[0] == 'x' || digits[0] == 'X') {
            base = 16;
            digits.remove_prefix(1);
        }
        std::uint32_t value = 0;
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
        if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size())
            return 0;
        if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF))
            return 0;
        append_utf8(out, static_cast<UChar32>(value));
        return semi - pos + 1;
    }
    return 0;
}

std::string decode_entities(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '&') {
            if (auto used = decode_entity(s, i, out)) {
                i += used;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

std::string collapse_whitespace(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char ch : s) {
        if (is_space(ch)) {
            pending = !out.empty();
            continue;
        }
        if (pending)
            out.push_back(' ');
        pending = false;
        out.push_back(ch);
    }
    return out;
}

std::string strip_markup(std::string_view s, std::vector<std::string>* warnings)
{
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '<') {
            // Entities are decoded per text run so that a decoded '<' is never
            // mistaken for markup.
            auto next = s.find('<', i);
            if (next == std::string_view::npos)
                next = s.size();
            // A stray '>' outside any tag is markup debris, not text.
            std::string run(s.substr(i, next - i));
            std::replace(run.begin(), run.end(), '>', ' ');
            out += decode_entities(run);
            i = next;
            continue;
        }
        std::string_view closer = ">";
        if (s.substr(i, 4) == "<!--")
            closer = "-->";
        else if (s.substr(i, 9) == "<![CDATA[")
            closer = "]]>";
        auto end = s.find(closer, i + 1);
        if (end == std::string_view::npos) {
            if (warnings)
                warnings->push_back("unterminated tag at byte offset " + std::to_string(i) + " dropped");
            break;
        }
        if (closer == "]]>") {
            // CDATA content is character data, not a tag.
            out.push_back(' ');
            out.append(s.substr(i + 9, end - i - 9));
        }
        out.push_back(' ');
        i = end + closer.size();
    }
    return collapse_whitespace(out);
}

enum class CharClass { word, digit, joiner, other };

CharClass classify(UChar32 cp)
{
    if (cp < 0)
        return CharClass::other;
    if (cp == '-' || cp == '\'' || cp == 0x2019 || cp == 0x2010 || cp == 0x2011)
        return CharClass::joiner;
    auto mask = U_GET_GC_MASK(cp);
    if (mask & (U_GC_L_MASK | U_GC_M_MASK))
        return CharClass::word;
    if (mask & U_GC_ND_MASK)
        return CharClass::digit;
    return CharClass::other;
}

} // namespace

FormatHint parse_format_hint(std::string_view name)
{
    if (name == "plain")
        return FormatHint::plain;
    if (name == "xml")
        return FormatHint::xml;
    if (name == "html")
        return FormatHint::html;
    if (name == "auto")
        return FormatHint::automatic;
    throw ConfigError("unknown format hint '" + std::string(name) + "'");
}

std::string_view to_string(FormatHint hint)
{
    switch (hint) {
    case FormatHint::plain: return "plain";
    case FormatHint::xml: return "xml";
    case FormatHint::html: return "html";
    case FormatHint::automatic: return "auto";
    }
    return "auto";
}

std::string extract_text(std::string_view raw, FormatHint hint, std::vector<std::string>* warnings)
{
    validate_utf8(raw);
    raw = strip_bom(raw);
    if (hint == FormatHint::automatic) {
        auto first = std::find_if_not(raw.begin(), raw.end(), is_space);
        hint = (first != raw.end() && *first == '<') ? FormatHint::xml : FormatHint::plain;
    }
    if (hint == FormatHint::plain)
        return std::string(raw);
    return strip_markup(raw, warnings);
}

std::string fold_case(std::string_view utf8)
{
    std::string out;
    out.reserve(utf8.size());
    std::size_t pos = 0;
    while (pos < utf8.size()) {
        std::size_t at = pos;
        UChar32 cp = next_code_point(utf8, pos);
        if (cp < 0)
            out.append(utf8.substr(at, pos - at));
        else
            append_utf8(out, u_tolower(cp));
    }
    return out;
}

std::vector<TokenSpan> tokenize_with_offsets(std::string_view text)
{
    struct Unit {
        CharClass cls;
        std::size_t begin;
        std::size_t end;
        UChar32 cp;
    };
    std::vector<Unit> units;
    units.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
        std::size_t at = pos;
        UChar32 cp = next_code_point(text, pos);
        units.push_back({classify(cp), at, pos, cp});
    }

    auto alnum = [](CharClass c) { return c == CharClass::word || c == CharClass::digit; };

    std::vector<TokenSpan> tokens;
    std::size_t i = 0;
    while (i < units.size()) {
        if (!alnum(units[i].cls)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        bool has_letter = false;
        std::string folded;
        while (j < units.size()) {
            if (alnum(units[j].cls)) {
                has_letter = has_letter || units[j].cls == CharClass::word;
                append_utf8(folded, u_tolower(units[j].cp));
                ++j;
            } else if (units[j].cls == CharClass::joiner && j + 1 < units.size() && alnum(units[j + 1].cls)) {
                append_utf8(folded, units[j].cp);
                ++j;
            } else {
                break;
            }
        }
        if (has_letter)
            tokens.push_back({std::move(folded), units[i].begin, units[j - 1].end});
        i = j;
    }
    return tokens;
}

std::vector<std::string> tokenize(std::string_view text)
{
    auto spans = tokenize_with_offsets(text);
    std::vector<std::string> out;
    out.reserve(spans.size());
    for (auto& s : spans)
        out.push_back(std::move(s.token));
    return out;
}

void StopLists::add(std::string_view entry)
{
    auto tokens = tokenize(entry);
    if (tokens.size() == 1)
        single.insert(std::move(tokens.front()));
    else if (tokens.size() >= 2)
        multi.insert(std::move(tokens));
}

void StopLists::merge(const StopLists& other)
{
    single.insert(other.single.begin(), other.single.end());
    multi.insert(other.multi.begin(), other.multi.end());
}

std::string StopLists::fingerprint() const
{
    Fnv1a64 h;
    for (const auto& w : single)
        h.update_field(w);
    h.update_field("\x1e");
    for (const auto& phrase : multi) {
        for (const auto& w : phrase)
            h.update_field(w);
        h.update_field("\x1e");
    }
    return h.hex();
}

StopLists parse_stoplist(std::string_view text)
{
    StopLists out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#')
            continue;
        out.add(line);
    }
    return out;
}

StopLists load_stoplist(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open stop list " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto text = ss.str();
    validate_utf8(text);
    return parse_stoplist(strip_bom(text));
}

namespace {

// One left-to-right pass over tokens[idx[..]]: phrases first (longest match
// wins), then single stop words.
std::vector<std::size_t> filter_pass(const std::vector<std::string>& tokens, const std::vector<std::size_t>& idx,
                                     const StopLists& stops, std::size_t longest)
{
    std::vector<std::size_t> out;
    out.reserve(idx.size());
    std::vector<std::string> probe;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t matched = 0;
        for (std::size_t len = std::min(longest, idx.size() - i); len >= 2; --len) {
            probe.clear();
            for (std::size_t j = i; j < i + len; ++j)
                probe.push_back(tokens[idx[j]]);
            if (stops.multi.contains(probe)) {
                matched = len;
                break;
            }
        }
        if (matched) {
            i += matched;
            continue;
        }
        if (!stops.single.contains(tokens[idx[i]]))
            out.push_back(idx[i]);
        ++i;
    }
    return out;
}

} // namespace

std::vector<std::size_t> surviving_indices(const std::vector<std::string>& tokens, const StopLists& stops)
{
    std::size_t longest = 0;
    for (const auto& phrase : stops.multi)
        longest = std::max(longest, phrase.size());

    std::vector<std::size_t> current(tokens.size());
    for (std::size_t i = 0; i < current.size(); ++i)
        current[i] = i;
    if (stops.empty())
        return current;
    // Removing a stop entry can join tokens into a new phrase occurrence, so
    // passes repeat until nothing changes.
    for (;;) {
        auto next = filter_pass(tokens, current, stops, longest);
        if (next.size() == current.size())
            return next;
        current = std::move(next);
    }
}

std::vector<std::string> apply_stoplists(const std::vector<std::string>& tokens, const StopLists& stops)
{
    std::vector<std::string> out;
    for (auto i : surviving_indices(tokens, stops))
        out.push_back(tokens[i]);
    return out;
}

FeatureSpec FeatureSpec::ngram(int n)
{
    if (n < 2)
        throw ConfigError("ngram feature size must be >= 2");
    FeatureSpec s;
    s.kind = Kind::ngram;
    s.n = n;
    return s;
}

FeatureSpec FeatureSpec::external(std::string command)
{
    if (command.empty())
        throw ConfigError("external featurizer command is empty");
    FeatureSpec s;
    s.kind = Kind::external;
    s.external_command = std::move(command);
    return s;
}

std::string FeatureSpec::to_string() const
{
    switch (kind) {
    case Kind::token: return "token";
    case Kind::ngram: return "ngram " + std::to_string(n);
    case Kind::external: return "external " + external_command;
    }
    return "token";
}

FeatureSpec FeatureSpec::parse(std::string_view text)
{
    auto space = text.find(' ');
    std::string_view head = text.substr(0, space);
    std::string_view rest = space == std::string_view::npos ? std::string_view{} : text.substr(space + 1);
    if (head == "token" && rest.empty())
        return token();
    if (head == "ngram") {
        int n = 0;
        auto [end, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
        if (ec != std::errc() || end != rest.data() + rest.size())
            throw ConfigError("bad ngram size in feature spec '" + std::string(text) + "'");
        return ngram(n);
    }
    if (head == "external")
        return external(std::string(rest));
    throw ConfigError("unknown feature spec '" + std::string(text) + "'");
}

std::int64_t FeatureDoc::total_count() const noexcept
{
    std::int64_t sum = 0;
    for (const auto& [_, c] : features)
        sum += c;
    return sum;
}

std::vector<std::string> run_external_featurizer(const std::string& command,
                                                 const std::vector<std::string>& tokens)
{
    char path[] = "/tmp/profcat-featurizer-XXXXXX";
    int fd = ::mkstemp(path);
    if (fd < 0)
        throw ExternalError("cannot create temporary file for external featurizer");
    {
        std::string payload;
        for (const auto& t : tokens) {
            payload += t;
            payload += '\n';
        }
        std::size_t written = 0;
        while (written < payload.size()) {
            auto n = ::write(fd, payload.data() + written, payload.size() - written);
            if (n <= 0) {
                ::close(fd);
                ::unlink(path);
                throw ExternalError("cannot write external featurizer input");
            }
            written += static_cast<std::size_t>(n);
        }
        ::close(fd);
    }

    std::string shell = command + " < '" + path + "'";
    FILE* pipe = ::popen(shell.c_str(), "r");
    if (!pipe) {
        ::unlink(path);
        throw ExternalError("cannot start external featurizer '" + command + "'");
    }
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        output.append(buf.data(), n);
    int status = ::pclose(pipe);
    ::unlink(path);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw ExternalError("external featurizer '" + command + "' failed with status " + std::to_string(status));

    std::vector<std::string> features;
    std::size_t pos = 0;
    while (pos < output.size()) {
        auto nl = output.find('\n', pos);
        if (nl == std::string::npos)
            nl = output.size();
        std::string line = output.substr(pos, nl - pos);
        pos = nl + 1;
        // Tabs and carriage returns are field/record separators in the model file.
        std::replace(line.begin(), line.end(), '\t', ' ');
        std::erase(line, '\r');
        if (!line.empty())
            features.push_back(std::move(line));
    }
    return features;
}

FeatureDoc featurize(const std::vector<std::string>& tokens, const FeatureSpec& spec, std::string doc_id)
{
    FeatureDoc doc;
    doc.doc_id = std::move(doc_id);
    doc.token_count = static_cast<std::int64_t>(tokens.size());
    switch (spec.kind) {
    case FeatureSpec::Kind::token:
        for (const auto& t : tokens)
            ++doc.features[t];
        break;
    case FeatureSpec::Kind::ngram: {
        auto n = static_cast<std::size_t>(spec.n);
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string gram = tokens[i];
            for (std::size_t j = 1; j < n; ++j) {
                gram += ' ';
                gram += tokens[i + j];
            }
            ++doc.features[gram];
        }
        break;
    }
    case FeatureSpec::Kind::external:
        if (!tokens.empty()) {
            for (auto& f : run_external_featurizer(spec.external_command, tokens))
                ++doc.features[f];
        }
        break;
    }
    return doc;
}

FeatureDoc prepare_document(std::string_view raw, FormatHint hint, const FeatureSpec& spec,
                            const StopLists& stops, std::string doc_id)
{
    auto tokens = tokenize(extract_text(raw, hint));
    auto token_count = static_cast<std::int64_t>(tokens.size());
    auto doc = featurize(apply_stoplists(tokens, stops), spec, std::move(doc_id));
    doc.token_count = token_count;
    return doc;
}

} // namespace profcat
