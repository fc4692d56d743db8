#include "swingshot/nets.hpp"

#include <string>

namespace swingshot {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Softsign: return "softsign";
    case Activation::Tanh: return "tanh";
    case Activation::Linear: return "linear";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "softsign") return Activation::Softsign;
  if (name == "tanh") return Activation::Tanh;
  if (name == "linear") return Activation::Linear;
  throw std::invalid_argument("unknown activation: " + name);
}

MlpSpec simple_actor_spec(int obs_dim) {
  MlpSpec s;
  s.input_dim = obs_dim;
  s.hidden = {256, 256, 256};
  s.hidden_act = {Activation::Relu, Activation::Relu, Activation::Relu};
  s.output_dim = 2;
  s.output_act = Activation::Tanh;
  return s;
}

MlpSpec simple_critic_spec(int obs_dim) {
  MlpSpec s;
  s.input_dim = obs_dim;
  s.hidden = {256, 256, 256};
  s.hidden_act = {Activation::Relu, Activation::Relu, Activation::Relu};
  s.output_dim = 1;
  s.output_act = Activation::Linear;
  return s;
}

MlpSpec full_actor_spec(int obs_dim) {
  MlpSpec s;
  s.input_dim = obs_dim;
  s.hidden = {256, 256, 256, 256, 256};
  s.hidden_act = {Activation::Softsign, Activation::Softsign, Activation::Softsign,
                  Activation::Relu, Activation::Relu};
  s.output_dim = 15;
  s.output_act = Activation::Tanh;
  return s;
}

MlpSpec full_critic_spec(int obs_dim) {
  MlpSpec s;
  s.input_dim = obs_dim;
  s.hidden = {256, 256, 256, 256, 256};
  s.hidden_act = {Activation::Relu, Activation::Relu, Activation::Relu, Activation::Relu,
                  Activation::Relu};
  s.output_dim = 1;
  s.output_act = Activation::Linear;
  return s;
}

}  // namespace swingshot
