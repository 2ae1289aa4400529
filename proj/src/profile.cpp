#include "forcekit/profile.hpp"

#include "forcekit/error.hpp"

namespace forcekit {

Profile parse_profile(std::string_view name) {
    if (name == "sine") return Profile::sine;
    if (name == "raised-cosine") return Profile::raised_cosine;
    throw InputError("unknown profile '" + std::string(name) + "' (expected sine or raised-cosine)");
}

std::string to_string(Profile p) {
    switch (p) {
        case Profile::sine: return "sine";
        case Profile::raised_cosine: return "raised-cosine";
    }
    return "?";
}

}  // namespace forcekit
