#include "edelta/diff.hpp"

#include <algorithm>

namespace edelta {

namespace {

struct LineCursor {
    std::string_view text;
    std::size_t pos = 0;
    int line_no = 0;

    bool eof() const { return pos >= text.size(); }

    std::string_view next() {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        return line;
    }

    std::string_view peek() const {
        LineCursor copy = *this;
        return copy.next();
    }
};

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

// Strip the git "a/" / "b/" prefix and any timestamp after a tab.
std::string clean_diff_path(std::string_view raw, char side) {
    if (!raw.empty() && raw.front() == '"') {
        // Quoted path with backslash escapes.
        std::string out;
        for (std::size_t i = 1; i < raw.size() && raw[i] != '"'; ++i) {
            if (raw[i] == '\\' && i + 1 < raw.size()) {
                ++i;
                switch (raw[i]) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: out += raw[i]; break;
                }
            } else {
                out += raw[i];
            }
        }
        raw = out;
        const std::string prefix = std::string(1, side) + "/";
        if (starts_with(raw, prefix))
            out = out.substr(2);
        return out;
    }
    std::size_t tab = raw.find('\t');
    if (tab != std::string_view::npos)
        raw = raw.substr(0, tab);
    const char prefix[3] = {side, '/', '\0'};
    if (starts_with(raw, prefix))
        raw.remove_prefix(2);
    return std::string(raw);
}

bool is_dev_null(std::string_view path) {
    return path == "/dev/null";
}

// "@@ -a[,b] +c[,d] @@" -> (a, b, c, d); counts default to 1.
struct HunkRange {
    long old_start = 0, old_count = 1;
    long new_start = 0, new_count = 1;
};

bool parse_hunk_header(std::string_view line, HunkRange& out) {
    std::size_t i = 0;
    auto consume = [&](std::string_view token) {
        if (line.substr(i, token.size()) != token)
            return false;
        i += token.size();
        return true;
    };
    auto consume_number = [&](long& value) {
        std::size_t start = i;
        while (i < line.size() && line[i] >= '0' && line[i] <= '9')
            ++i;
        if (i == start)
            return false;
        value = 0;
        for (std::size_t k = start; k < i; ++k)
            value = value * 10 + (line[k] - '0');
        return true;
    };
    if (!consume("@@ -") || !consume_number(out.old_start))
        return false;
    if (consume(",") && !consume_number(out.old_count))
        return false;
    if (!consume(" +") || !consume_number(out.new_start))
        return false;
    if (consume(",") && !consume_number(out.new_count))
        return false;
    return consume(" @@");
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
    // Recursive matcher; '*' stays within one path segment, "**" crosses '/'.
    const char* p = pattern.data();
    const char* pe = p + pattern.size();
    const char* s = path.data();
    const char* se = s + path.size();

    struct Matcher {
        static bool run(const char* p, const char* pe, const char* s, const char* se) {
            while (p != pe) {
                if (*p == '*') {
                    const bool dbl = (p + 1 != pe && p[1] == '*');
                    const char* rest = p + (dbl ? 2 : 1);
                    if (dbl && rest != pe && *rest == '/') {
                        if (run(rest + 1, pe, s, se)) // "**/" matching nothing
                            return true;
                    }
                    for (const char* t = s;; ++t) {
                        if (run(rest, pe, t, se))
                            return true;
                        if (t == se)
                            break;
                        if (!dbl && *t == '/')
                            break;
                    }
                    return false;
                }
                if (s == se)
                    return false;
                if (*p == '?') {
                    if (*s == '/')
                        return false;
                } else if (*p != *s) {
                    return false;
                }
                ++p;
                ++s;
            }
            return s == se;
        }
    };
    return Matcher::run(p, pe, s, se);
}

std::set<std::string> match_test_files(const std::set<std::string>& touched,
                                       const std::vector<std::string>& globs) {
    std::set<std::string> out;
    for (const std::string& f : touched)
        for (const std::string& g : globs)
            if (glob_match(g, f)) {
                out.insert(f);
                break;
            }
    return out;
}

ChangeSet parse_unified_diff(std::string_view text) {
    ChangeSet change;
    LineCursor cur{text};

    std::string old_path;
    std::string new_path;

    auto touch = [&](const std::string& p) {
        if (!p.empty() && !is_dev_null(p))
            change.touched_files.insert(normalize_path(p));
    };

    while (!cur.eof()) {
        std::string_view line = cur.next();

        if (starts_with(line, "diff ")) {
            old_path.clear();
            new_path.clear();
            continue;
        }
        if (starts_with(line, "rename from ") || starts_with(line, "copy from ")) {
            touch(std::string(line.substr(line.find("from ") + 5)));
            continue;
        }
        if (starts_with(line, "rename to ") || starts_with(line, "copy to ")) {
            touch(std::string(line.substr(line.find("to ") + 3)));
            continue;
        }
        if (starts_with(line, "Binary files ") || starts_with(line, "GIT binary patch")) {
            change.warnings.push_back("binary hunk skipped: " + std::string(line));
            continue;
        }
        if (starts_with(line, "--- ")) {
            old_path = clean_diff_path(line.substr(4), 'a');
            touch(old_path);
            continue;
        }
        if (starts_with(line, "+++ ")) {
            new_path = clean_diff_path(line.substr(4), 'b');
            touch(new_path);
            continue;
        }
        if (starts_with(line, "@@")) {
            HunkRange range;
            if (!parse_hunk_header(line, range))
                throw DiffParseError(cur.line_no, "malformed hunk header: " + std::string(line));
            if (old_path.empty() && new_path.empty())
                throw DiffParseError(cur.line_no, "hunk without preceding ---/+++ file headers");
            // A lone header: the other side behaves like an absent file.
            if (old_path.empty())
                old_path = "/dev/null";
            if (new_path.empty())
                new_path = "/dev/null";

            long old_line = range.old_start;
            long new_line = range.new_start;
            long old_left = range.old_count;
            long new_left = range.new_count;

            while (old_left > 0 || new_left > 0) {
                if (cur.eof())
                    throw DiffParseError(cur.line_no, "diff truncated inside hunk");
                const int body_line_no = cur.line_no + 1;
                std::string_view body = cur.next();
                if (body.empty()) {
                    // Whitespace-stripped context line.
                    --old_left;
                    --new_left;
                    ++old_line;
                    ++new_line;
                } else if (body[0] == ' ') {
                    --old_left;
                    --new_left;
                    ++old_line;
                    ++new_line;
                } else if (body[0] == '-') {
                    if (old_left <= 0 || is_dev_null(old_path))
                        throw DiffParseError(body_line_no, "deletion outside old-file range");
                    change.deletions.insert(
                        LineRef{normalize_path(old_path), static_cast<int>(old_line), Version::V1});
                    ++old_line;
                    --old_left;
                } else if (body[0] == '+') {
                    if (new_left <= 0 || is_dev_null(new_path))
                        throw DiffParseError(body_line_no, "addition outside new-file range");
                    change.additions.insert(
                        LineRef{normalize_path(new_path), static_cast<int>(new_line), Version::V2});
                    ++new_line;
                    --new_left;
                } else if (body[0] == '\\') {
                    // "\ No newline at end of file"
                } else {
                    throw DiffParseError(body_line_no, "unexpected line inside hunk: " + std::string(body));
                }
            }
            continue;
        }
        // Anything else (index lines, mode lines, commit message context) is
        // ignored.
    }
    return change;
}

TestSelection select_tests(const ChangeSet& change, const CoverageMap& cov_v1,
                           const CoverageMap& cov_v2, const std::set<std::string>& test_files) {
    if (cov_v1.version != Version::V1)
        throw VersionMismatch("first coverage map is not tagged v1");
    if (cov_v2.version != Version::V2)
        throw VersionMismatch("second coverage map is not tagged v2");

    TestSelection sel;
    for (const auto& [test, lines] : cov_v1.tests) {
        (void)lines;
        for (const LineRef& d : change.deletions)
            if (cov_v1.exec(d.file, d.line, test) > 0) {
                sel.from_v1.insert(test);
                break;
            }
    }
    for (const auto& [test, lines] : cov_v2.tests) {
        (void)lines;
        for (const LineRef& a : change.additions)
            if (cov_v2.exec(a.file, a.line, test) > 0) {
                sel.from_v2.insert(test);
                break;
            }
    }

    std::set<std::string> touched_test_files;
    for (const std::string& f : test_files) {
        const std::string norm = normalize_path(f);
        if (change.touched_files.count(norm))
            touched_test_files.insert(norm);
    }

    auto defined_in = [&](const TestId& t, const std::string& file) {
        auto loc1 = cov_v1.test_locations.find(t);
        auto loc2 = cov_v2.test_locations.find(t);
        if (loc1 != cov_v1.test_locations.end() || loc2 != cov_v2.test_locations.end())
            return (loc1 != cov_v1.test_locations.end() && loc1->second == file) ||
                   (loc2 != cov_v2.test_locations.end() && loc2->second == file);
        // No declared location: fall back to "the test executes lines of this
        // test file".
        return cov_v1.covers(file, t) || cov_v2.covers(file, t);
    };

    std::set<TestId> covering = sel.from_v1;
    covering.insert(sel.from_v2.begin(), sel.from_v2.end());

    for (const TestId& t : covering) {
        const bool modified = std::any_of(touched_test_files.begin(), touched_test_files.end(),
                                          [&](const std::string& f) { return defined_in(t, f); });
        if (modified)
            sel.discarded_modified.insert(t);
        else
            sel.selected.insert(t);
    }
    sel.no_covering_tests = sel.selected.empty();
    return sel;
}

json selection_to_json(const TestSelection& sel) {
    return json{{"selected", sel.selected},
                {"discarded_modified", sel.discarded_modified},
                {"from_v1", sel.from_v1},
                {"from_v2", sel.from_v2},
                {"no_covering_tests", sel.no_covering_tests}};
}

TestSelection selection_from_json(const json& j) {
    TestSelection sel;
    try {
        sel.selected = j.at("selected").get<std::set<TestId>>();
        sel.discarded_modified = j.at("discarded_modified").get<std::set<TestId>>();
        sel.from_v1 = j.at("from_v1").get<std::set<TestId>>();
        sel.from_v2 = j.at("from_v2").get<std::set<TestId>>();
        sel.no_covering_tests = j.value("no_covering_tests", false);
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad test selection: ") + e.what());
    }
    return sel;
}

} // namespace edelta
