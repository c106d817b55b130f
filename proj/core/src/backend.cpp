#include "phishguard/agents/backend.hpp"

#include "phishguard/agents/http_backend.hpp"
#include "phishguard/agents/mock_backend.hpp"

namespace phishguard::agents {

std::shared_ptr<ChatBackend> make_backend(const ChatBackendConfig& config) {
  if (config.kind == BackendKind::Mock) return std::make_shared<MockBackend>(config);
  return std::make_shared<HttpBackend>(config);
}

}  // namespace phishguard::agents
