#include "vlcalloc/parallel.hpp"

#include <cstdlib>
#include <string>

#include "vlcalloc/error.hpp"

namespace vlcalloc {

unsigned worker_count_from_env() {
    if (const char* value = std::getenv(kWorkersEnv); value != nullptr && *value != '\0') {
        try {
            const long n = std::stol(value);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
        throw Error(std::string(kWorkersEnv) + " must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace vlcalloc
