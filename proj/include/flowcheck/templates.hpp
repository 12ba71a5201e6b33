#pragma once

#include "flowcheck/formula.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace flowcheck {

struct TemplateParam {
    std::string name;
    std::string kind = "event-or-fluent";

    bool operator==(const TemplateParam&) const = default;
};

struct Template {
    std::string id;
    std::string title;
    std::string description;
    std::vector<TemplateParam> params;
    Formula skeleton; // contains Placeholder nodes for the params

    bool operator==(const Template&) const = default;
};

class CatalogError : public Error {
public:
    enum class Kind { Syntax, DuplicateTemplateId, UnknownTemplate, MissingBinding, UnknownName };

    CatalogError(Kind kind, const std::string& message);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct Catalog {
    std::vector<Template> templates;
    std::string source;

    const Template* find(std::string_view id) const;
    const Template& at(std::string_view id) const; // throws UnknownTemplate
};

/// The ten built-in Declare-style templates, in a fixed order.
const std::vector<Template>& builtin_templates();

/// Built-ins overridden and extended by the templates in `xml`, in document order:
///   <templates>
///     <template id="response" title="Response">
///       <description>...</description>
///       <param name="A"/> <param name="B"/>
///       <skeleton>[]($A -> <>$B)</skeleton>
///     </template>
///   </templates>
/// Whitespace-only input yields the built-ins.
Catalog parse_catalog(std::string_view xml, std::string source = {});
Catalog load_catalog(const std::string& path);

/// Names a binding may refer to. With `open` set any syntactically valid
/// event label or fluent name is accepted.
struct NameScope {
    std::set<std::string> events;
    std::set<std::string> fluents;
    bool open = false;
};

Formula instantiate(const Template& t, const std::map<std::string, std::string>& bindings, const NameScope& scope);

/// `response` -> `response`, `co-existence` -> `co_existence`.
std::string assertion_name_for(std::string_view template_id);

} // namespace flowcheck
