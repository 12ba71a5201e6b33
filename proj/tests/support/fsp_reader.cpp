#include "fsp_reader.hpp"

#include <cctype>
#include <stdexcept>

namespace testsupport {

std::size_t FspProcess::num_edges() const {
    std::size_t n = 0;
    for (const auto& [name, edges] : states)
        n += edges.size();
    return n;
}

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    FspProcess run() {
        FspProcess p;
        p.name = identifier();
        expect("=");
        p.initial = identifier();
        while (accept(",")) {
            const std::string local = identifier();
            expect("=");
            expect("(");
            auto& edges = p.states[local];
            if (!edges.empty())
                fail("local process " + local + " defined twice");
            do {
                std::string action = action_label();
                expect("->");
                edges.emplace_back(std::move(action), identifier());
            } while (accept("|"));
            expect(")");
        }
        expect(".");
        skip_space();
        if (pos_ != text_.size())
            fail("trailing text");
        if (!p.states.contains(p.initial))
            fail("undefined initial process");
        for (const auto& [local, edges] : p.states)
            for (const auto& [action, target] : edges)
                if (!p.states.contains(target))
                    fail("undefined process " + target);
        return p;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) != token)
            return false;
        pos_ += token.size();
        return true;
    }

    void expect(std::string_view token) {
        if (!accept(token))
            fail("expected '" + std::string(token) + "'");
    }

    std::string identifier() {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isupper(static_cast<unsigned char>(text_[pos_])))
            fail("expected a process name");
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string action_label() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.'))
            ++pos_;
        if (pos_ == start)
            fail("expected an action");
        return std::string(text_.substr(start, pos_ - start));
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw std::runtime_error("FSP " + message + " at offset " + std::to_string(pos_));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

FspProcess read_fsp(std::string_view text) { return Reader(text).run(); }

} // namespace testsupport
