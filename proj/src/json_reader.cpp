#include "json_reader.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <set>
#include <vector>

#include "ibrsc/errors.hpp"

namespace ibrsc::detail {

namespace {

struct Frame {
    bool object = false;
    std::string path;
    std::string key;
    int index = 0;
    bool expect_key = true;
    bool pending = true;  // array: next token starts an element
};

std::string child(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

}  // namespace

LineIndex::LineIndex(const std::string& text) {
    std::vector<Frame> stack;
    int line = 1;
    auto mark_element = [&] {
        if (stack.empty() || stack.back().object || !stack.back().pending) return std::string{};
        Frame& f = stack.back();
        f.pending = false;
        std::string p = f.path + "[" + std::to_string(f.index) + "]";
        lines_.emplace(p, line);
        return p;
    };
    auto value_path = [&](const std::string& elem) {
        if (!elem.empty()) return elem;
        if (stack.empty()) return std::string{};
        const Frame& f = stack.back();
        return f.object ? child(f.path, f.key) : f.path + "[" + std::to_string(f.index) + "]";
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '\n') {
            ++line;
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == ':') continue;
        if (ch == ',') {
            if (stack.empty()) continue;
            if (stack.back().object) {
                stack.back().expect_key = true;
            } else {
                ++stack.back().index;
                stack.back().pending = true;
            }
            continue;
        }
        if (ch == '}' || ch == ']') {
            if (!stack.empty()) stack.pop_back();
            continue;
        }
        const std::string elem = mark_element();
        if (ch == '{' || ch == '[') {
            Frame f;
            f.object = ch == '{';
            f.path = value_path(elem);
            stack.push_back(std::move(f));
            continue;
        }
        if (ch == '"') {
            std::string s;
            for (++i; i < text.size() && text[i] != '"'; ++i) {
                if (text[i] == '\\' && i + 1 < text.size()) ++i;
                if (text[i] == '\n') ++line;
                s.push_back(text[i]);
            }
            if (!stack.empty() && stack.back().object && stack.back().expect_key) {
                stack.back().key = s;
                stack.back().expect_key = false;
                lines_.emplace(child(stack.back().path, s), line);
            }
            continue;
        }
        // bare literal: skip to the next delimiter
        while (i + 1 < text.size() && std::string_view(",}] \t\r\n").find(text[i + 1]) == std::string_view::npos) ++i;
    }
}

int LineIndex::line(const std::string& path) const {
    const auto it = lines_.find(path);
    return it == lines_.end() ? 0 : it->second;
}

void Node::fail(const std::string& msg) const {
    const int ln = lines_->line(path_);
    std::string where = *origin_;
    if (ln > 0) where += ":" + std::to_string(ln);
    throw InputError(where + ": field '" + (path_.empty() ? std::string("<root>") : path_) + "': " + msg);
}

bool Node::has(const char* key) const { return j_->is_object() && j_->contains(key) && !(*j_)[key].is_null(); }

Node Node::at(const char* key) const {
    expect_object();
    if (!j_->contains(key)) fail(std::string("missing required field '") + key + "'");
    return {(*j_)[key], child(path_, key), *lines_, *origin_};
}

std::optional<Node> Node::find(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Node((*j_)[key], child(path_, key), *lines_, *origin_);
}

Node Node::operator[](std::size_t i) const {
    expect_array();
    return {(*j_)[i], path_ + "[" + std::to_string(i) + "]", *lines_, *origin_};
}

std::size_t Node::size() const {
    expect_array();
    return j_->size();
}

void Node::only(std::initializer_list<const char*> known) const {
    expect_object();
    const std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = j_->begin(); it != j_->end(); ++it) {
        if (!allowed.contains(it.key())) Node(it.value(), child(path_, it.key()), *lines_, *origin_).fail("unknown field");
    }
}

void Node::expect_object() const {
    if (!j_->is_object()) fail("expected an object");
}

void Node::expect_array() const {
    if (!j_->is_array()) fail("expected an array");
}

double Node::number() const {
    if (j_->is_string()) {
        const std::string s = j_->get<std::string>();
        if (s == "inf" || s == "Infinity") return HUGE_VAL;
    }
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
}

int Node::integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<int>();
}

bool Node::boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
}

std::string Node::string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
}

Phasor Node::complex() const {
    if (j_->is_number()) return {j_->get<double>(), 0.0};
    if (j_->is_array()) {
        if (j_->size() != 2 || !(*j_)[0].is_number() || !(*j_)[1].is_number()) fail("expected [re, im]");
        return {(*j_)[0].get<double>(), (*j_)[1].get<double>()};
    }
    if (j_->is_object()) {
        only({"mag", "deg"});
        return std::polar(at("mag").number(), deg_to_rad(at("deg").number()));
    }
    if (j_->is_string()) {
        const std::string s = j_->get<std::string>();
        if (s == "inf" || s == "Infinity") return {HUGE_VAL, 0.0};
    }
    fail("expected a complex number ([re, im] or {\"mag\", \"deg\"})");
}

double Node::number_or(const char* key, double def) const { return has(key) ? at(key).number() : def; }
int Node::integer_or(const char* key, int def) const { return has(key) ? at(key).integer() : def; }
bool Node::boolean_or(const char* key, bool def) const { return has(key) ? at(key).boolean() : def; }
std::string Node::string_or(const char* key, const std::string& def) const {
    return has(key) ? at(key).string() : def;
}
std::optional<Phasor> Node::complex_opt(const char* key) const {
    if (!has(key)) return std::nullopt;
    return at(key).complex();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw InputError(origin + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
    }
}

}  // namespace ibrsc::detail
