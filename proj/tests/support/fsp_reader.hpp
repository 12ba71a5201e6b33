#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace testsupport {

/// A flat FSP process: `P = S0, S0 = (a -> S1 | b -> S2), ... .`
struct FspProcess {
    std::string name;
    std::string initial;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> states; // local -> (action, target)

    std::size_t num_edges() const;
};

/// Reads the subset above; throws std::runtime_error on anything else,
/// including references to undefined local processes.
FspProcess read_fsp(std::string_view text);

} // namespace testsupport
