#include "tom/entity.hpp"

#include <vector>

namespace tom {

std::string entity_kind_name(EntityKind k) {
    switch (k) {
        case EntityKind::field: return "field";
        case EntityKind::constructor: return "constructor";
        case EntityKind::method: return "method";
    }
    return "method";
}

std::string EntityId::display() const {
    return class_name.empty() ? name : class_name + "." + name;
}

std::string EntityId::key() const {
    return class_name + "/" + entity_kind_name(kind) + "/" + name + "/" + std::to_string(arity);
}

std::optional<EntityId> EntityId::from_key(const std::string& key) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (parts.size() < 3) {
        std::size_t slash = key.find('/', start);
        if (slash == std::string::npos) return std::nullopt;
        parts.push_back(key.substr(start, slash - start));
        start = slash + 1;
    }
    parts.push_back(key.substr(start));

    EntityId id;
    id.class_name = parts[0];
    if (parts[1] == "field") id.kind = EntityKind::field;
    else if (parts[1] == "constructor") id.kind = EntityKind::constructor;
    else if (parts[1] == "method") id.kind = EntityKind::method;
    else return std::nullopt;
    id.name = parts[2];
    try {
        id.arity = std::stoi(parts[3]);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return id;
}

} // namespace tom
