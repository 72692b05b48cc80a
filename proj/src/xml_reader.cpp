#include "xml_reader.hpp"

#include <cstdint>

#include "exposure/errors.hpp"
#include "utf8.hpp"

namespace exposure::detail {
namespace {

bool is_name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    XmlElement document() {
        skip_misc();
        if (!starts_with("<") || starts_with("</")) fail("expected root element");
        XmlElement root = element();
        skip_misc();
        if (pos_ != text_.size()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SyntaxError("malformed XML: " + what, line, col);
    }

    // pos_ only moves forward, so the line count is advanced incrementally.
    std::size_t current_line() {
        for (; line_pos_ < pos_; ++line_pos_) line_ += text_[line_pos_] == '\n';
        return line_;
    }

    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

    void expect(std::string_view s) {
        if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
        pos_ += s.size();
    }

    void skip_until(std::string_view terminator, const char* what) {
        const auto end = text_.find(terminator, pos_);
        if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
        pos_ = end + terminator.size();
    }

    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    // Whitespace, comments, processing instructions and DOCTYPE between
    // top-level constructs.
    void skip_misc() {
        for (;;) {
            skip_space();
            if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("<!DOCTYPE")) {
                const auto end = text_.find('>', pos_);
                const auto bracket = text_.find('[', pos_);
                if (bracket != std::string_view::npos && bracket < end) fail("DOCTYPE internal subset not supported");
                skip_until(">", "DOCTYPE");
            } else {
                return;
            }
        }
    }

    std::string name() {
        if (pos_ >= text_.size() || !is_name_start(text_[pos_])) fail("expected a name");
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string decode(std::string_view raw) {
        std::string out;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const char c = raw[i];
            if (c == '<') fail("'<' in attribute value");
            if (c != '&') {
                out += c;
                continue;
            }
            const auto semi = raw.find(';', i);
            if (semi == std::string_view::npos) fail("unterminated entity reference");
            const std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out += '&';
            else if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else if (!ent.empty() && ent[0] == '#') {
                std::uint32_t cp = 0;
                const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
                const std::string_view digits = ent.substr(hex ? 2 : 1);
                if (digits.empty()) fail("empty character reference");
                for (char d : digits) {
                    std::uint32_t v;
                    if (d >= '0' && d <= '9') v = static_cast<std::uint32_t>(d - '0');
                    else if (hex && d >= 'a' && d <= 'f') v = static_cast<std::uint32_t>(d - 'a' + 10);
                    else if (hex && d >= 'A' && d <= 'F') v = static_cast<std::uint32_t>(d - 'A' + 10);
                    else fail("bad character reference");
                    cp = cp * (hex ? 16 : 10) + v;
                    if (cp > 0x10FFFF) fail("character reference out of range");
                }
                append_utf8(out, cp);
            } else {
                fail("unknown entity '&" + std::string(ent) + ";'");
            }
            i = semi;
        }
        return out;
    }

    XmlElement element() {
        XmlElement el;
        el.line = current_line();
        expect("<");
        el.name = name();
        for (;;) {
            const bool had_space = pos_ < text_.size() && is_space(text_[pos_]);
            skip_space();
            if (pos_ >= text_.size()) fail("unterminated start tag <" + el.name + ">");
            if (starts_with("/>")) {
                pos_ += 2;
                return el;
            }
            if (text_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (!had_space) fail("expected whitespace between attributes");
            std::string key = name();
            skip_space();
            expect("=");
            skip_space();
            if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) fail("expected quoted value");
            const char quote = text_[pos_++];
            const auto end = text_.find(quote, pos_);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            std::string value = decode(text_.substr(pos_, end - pos_));
            pos_ = end + 1;
            if (el.attribute(key)) fail("duplicate attribute '" + key + "'");
            el.attributes.emplace_back(std::move(key), std::move(value));
        }

        // content
        for (;;) {
            if (pos_ >= text_.size()) fail("unclosed element <" + el.name + ">");
            if (starts_with("</")) {
                pos_ += 2;
                const std::string closing = name();
                if (closing != el.name) fail("mismatched closing tag </" + closing + "> for <" + el.name + ">");
                skip_space();
                expect(">");
                return el;
            }
            if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("<![CDATA[")) {
                skip_until("]]>", "CDATA section");
            } else if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (text_[pos_] == '<') {
                el.children.push_back(element());
            } else {
                const auto next = text_.find('<', pos_);
                const auto stop = next == std::string_view::npos ? text_.size() : next;
                const std::string_view chunk = text_.substr(pos_, stop - pos_);
                if (chunk.find('&') != std::string_view::npos) decode(chunk);
                pos_ = stop;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

XmlElement parse_xml(std::string_view text) { return Reader(text).document(); }

}  // namespace exposure::detail
