#include "tom/testcase.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace tom {

std::string ObservationPoint::str() const {
    const char* tag = kind == Kind::return_value  ? "ret"
                    : kind == Kind::field_state   ? "field"
                                                  : "exc";
    return std::string(tag) + "@" + std::to_string(action_index);
}

std::optional<ObservationPoint> ObservationPoint::parse(const std::string& text) {
    auto split = text.find('@');
    if (split == std::string::npos) return std::nullopt;
    std::string tag = text.substr(0, split);
    ObservationPoint p;
    if (tag == "ret") p.kind = Kind::return_value;
    else if (tag == "field") p.kind = Kind::field_state;
    else if (tag == "exc") p.kind = Kind::exception_marker;
    else return std::nullopt;
    try {
        std::size_t used = 0;
        p.action_index = std::stoi(text.substr(split + 1), &used);
        if (used != text.size() - split - 1) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return p;
}

std::vector<ObservationPoint> TestCase::observation_points() const {
    std::vector<ObservationPoint> points;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        int idx = static_cast<int>(i);
        if (const auto* inv = std::get_if<InvokeAction>(&actions[i])) {
            if (inv->observe) {
                ObservationPoint p;
                p.action_index = idx;
                p.kind = ObservationPoint::Kind::return_value;
                points.push_back(std::move(p));
            }
        } else if (const auto* obs = std::get_if<ObserveFieldAction>(&actions[i])) {
            ObservationPoint p;
            p.action_index = idx;
            p.kind = ObservationPoint::Kind::field_state;
            p.object_label = obs->label;
            p.field_name = obs->field;
            // class_name is filled in below from the label's construct action
            for (const auto& a : actions) {
                if (const auto* c = std::get_if<ConstructAction>(&a)) {
                    if (c->label == obs->label) {
                        p.class_name = c->class_name;
                        break;
                    }
                }
            }
            points.push_back(std::move(p));
        }
        ObservationPoint marker;
        marker.action_index = idx;
        marker.kind = ObservationPoint::Kind::exception_marker;
        points.push_back(std::move(marker));
    }
    return points;
}

namespace {

std::string value_arg_str(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    return "0"; // unreachable for well-formed tests
}

std::string args_str(const std::vector<Value>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += value_arg_str(args[i]);
    }
    return out;
}

// Line scanner for the .mlgtest format.
class LineParser {
public:
    LineParser(std::string line) : s_(std::move(line)) {}

    void skip_ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
    }

    bool done() {
        skip_ws();
        return i_ >= s_.size();
    }

    bool accept_char(char c) {
        skip_ws();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    bool peek_char(char c) {
        skip_ws();
        return i_ < s_.size() && s_[i_] == c;
    }

    std::optional<std::string> word() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
                                  s_[i_] == '_' || s_[i_] == '@' || s_[i_] == '-' ||
                                  s_[i_] == ':')) {
            ++i_;
        }
        if (i_ == start) return std::nullopt;
        return s_.substr(start, i_ - start);
    }

private:
    std::string s_;
    std::size_t i_ = 0;
};

bool parse_arg_list(LineParser& p, std::vector<Value>& out) {
    if (!p.accept_char('(')) return false;
    if (p.accept_char(')')) return true;
    while (true) {
        auto w = p.word();
        if (!w) return false;
        if (*w == "true") {
            out.push_back(bool_value(true));
        } else if (*w == "false") {
            out.push_back(bool_value(false));
        } else {
            try {
                std::size_t used = 0;
                std::int64_t v = std::stoll(*w, &used);
                if (used != w->size()) return false;
                out.push_back(int_value(v));
            } catch (const std::exception&) {
                return false;
            }
        }
        if (p.accept_char(')')) return true;
        if (!p.accept_char(',')) return false;
    }
}

bool valid_ident(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

} // namespace

TestParseResult parse_mlgtest(const std::string& file_name, const std::string& text) {
    TestParseResult result;
    TestCase test;
    std::set<std::string> labels;
    bool saw_assert = false;

    auto lines = split_lines(normalize_newlines(text));
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        int line_no = static_cast<int>(ln + 1);
        auto fail = [&](const std::string& msg) {
            result.diagnostics.push_back({file_name, line_no, 1, msg});
        };

        std::string raw = lines[ln];
        auto hash = raw.find('#');
        if (hash != std::string::npos) {
            // provenance comments: "# generated seed=S iter=K"
            std::istringstream meta(raw.substr(hash + 1));
            std::string word;
            while (meta >> word) {
                if (word.rfind("seed=", 0) == 0)
                    test.gen_seed = std::strtoull(word.c_str() + 5, nullptr, 10);
                if (word.rfind("iter=", 0) == 0)
                    test.gen_iteration = std::strtoull(word.c_str() + 5, nullptr, 10);
            }
            raw = raw.substr(0, hash);
        }
        LineParser p(raw);
        if (p.done()) continue;

        auto first = p.word();
        if (!first) {
            fail("unrecognized test line");
            continue;
        }

        if (*first == "assert") {
            auto pt_word = p.word();
            auto pt = pt_word ? ObservationPoint::parse(*pt_word) : std::nullopt;
            if (!pt) {
                fail("bad assertion point");
                continue;
            }
            if (!(p.accept_char('=') && p.accept_char('='))) {
                fail("expected '==' in assertion");
                continue;
            }
            auto val_word = p.word();
            auto val = val_word ? value_from_str(*val_word) : std::nullopt;
            if (!val || is_unobserved(*val)) {
                fail("bad assertion value");
                continue;
            }
            test.assertions.push_back({*pt, *val});
            saw_assert = true;
            continue;
        }

        if (saw_assert) {
            fail("actions must precede assertions");
            continue;
        }

        if (*first == "observe") {
            if (p.peek_char('(')) {
                fail("missing callee after 'observe'");
                continue;
            }
            auto second = p.word();
            if (!second) {
                fail("expected call or 'field' after 'observe'");
                continue;
            }
            if (*second == "field" && !p.peek_char('.') && !p.peek_char('(')) {
                auto label = p.word();
                if (!label || !p.accept_char('.')) {
                    fail("expected label.field after 'observe field'");
                    continue;
                }
                auto field = p.word();
                if (!field || !p.done()) {
                    fail("expected label.field after 'observe field'");
                    continue;
                }
                if (!labels.count(*label)) {
                    fail("label used before definition: " + *label);
                    continue;
                }
                test.actions.emplace_back(ObserveFieldAction{*label, *field});
                continue;
            }
            // observed invoke: label.method(...) or toplevel(...)
            InvokeAction inv;
            inv.observe = true;
            if (p.accept_char('.')) {
                inv.label = *second;
                auto method = p.word();
                if (!method) {
                    fail("expected method name");
                    continue;
                }
                inv.method = *method;
            } else {
                inv.method = *second;
            }
            if (!parse_arg_list(p, inv.args) || !p.done()) {
                fail("bad argument list");
                continue;
            }
            if (inv.label && !labels.count(*inv.label)) {
                fail("label used before definition: " + *inv.label);
                continue;
            }
            test.actions.emplace_back(std::move(inv));
            continue;
        }

        // `label = new C(...)` or unobserved invoke
        if (p.accept_char('=')) {
            auto kw = p.word();
            if (!kw || *kw != "new") {
                fail("expected 'new' after '='");
                continue;
            }
            ConstructAction c;
            c.label = *first;
            auto cls = p.word();
            if (!cls || !valid_ident(*cls)) {
                fail("expected class name after 'new'");
                continue;
            }
            c.class_name = *cls;
            if (!parse_arg_list(p, c.args) || !p.done()) {
                fail("bad argument list");
                continue;
            }
            if (!valid_ident(c.label)) {
                fail("bad label name: " + c.label);
                continue;
            }
            if (!labels.insert(c.label).second) {
                fail("duplicate label: " + c.label);
                continue;
            }
            test.actions.emplace_back(std::move(c));
            continue;
        }

        InvokeAction inv;
        if (p.accept_char('.')) {
            inv.label = *first;
            auto method = p.word();
            if (!method) {
                fail("expected method name");
                continue;
            }
            inv.method = *method;
        } else {
            inv.method = *first;
        }
        if (!parse_arg_list(p, inv.args) || !p.done()) {
            fail("unrecognized test line");
            continue;
        }
        if (inv.label && !labels.count(*inv.label)) {
            fail("label used before definition: " + *inv.label);
            continue;
        }
        test.actions.emplace_back(std::move(inv));
    }

    if (!result.diagnostics.empty()) return result;

    // assertion points must name existing observation points
    auto points = test.observation_points();
    for (const auto& a : test.assertions) {
        bool found = false;
        for (const auto& pt : points) {
            if (pt.action_index == a.point.action_index && pt.kind == a.point.kind) {
                found = true;
                break;
            }
        }
        if (!found) {
            result.diagnostics.push_back(
                {file_name, 0, 0, "assertion names a point not observed by the test: " + a.point.str()});
        }
    }
    if (!result.diagnostics.empty()) return result;

    result.test = std::move(test);
    return result;
}

std::string action_str(const TestAction& action) {
    struct Printer {
        std::string operator()(const ConstructAction& c) const {
            return c.label + " = new " + c.class_name + "(" + args_str(c.args) + ")";
        }
        std::string operator()(const InvokeAction& i) const {
            std::string out = i.observe ? "observe " : "";
            if (i.label) out += *i.label + ".";
            out += i.method + "(" + args_str(i.args) + ")";
            return out;
        }
        std::string operator()(const ObserveFieldAction& o) const {
            return "observe field " + o.label + "." + o.field;
        }
    };
    return std::visit(Printer{}, action);
}

std::string serialize_mlgtest(const TestCase& test) {
    std::ostringstream os;
    if (test.gen_seed != 0 || test.gen_iteration != 0)
        os << "# generated seed=" << test.gen_seed << " iter=" << test.gen_iteration << "\n";
    for (const auto& a : test.actions) os << action_str(a) << "\n";
    for (const auto& a : test.assertions)
        os << "assert " << a.point.str() << " == " << value_str(a.expected) << "\n";
    return os.str();
}

} // namespace tom
