#include "cenn/layers.hpp"

namespace cenn {

bool same_functor(const FunctorPtr& a, const FunctorPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

std::string layer_name(const Layer& l) {
  struct {
    std::string operator()(const ConvLayer&) const { return "conv"; }
    std::string operator()(const GateLayer&) const { return "gate"; }
    std::string operator()(const LiftLayer&) const { return "lift"; }
    std::string operator()(const ComponentwiseLiftLayer&) const { return "componentwise_lift"; }
    std::string operator()(const BundleConvLayer& b) const { return b.retraction ? "retraction" : "bundle_conv"; }
  } v;
  return std::visit(v, l);
}

LayerType layer_input(const Layer& l) {
  struct {
    LayerType operator()(const ConvLayer& x) const { return {x.kernel.source(), false}; }
    LayerType operator()(const GateLayer& x) const { return {x.functor, false}; }
    LayerType operator()(const LiftLayer& x) const { return {x.functor, false}; }
    LayerType operator()(const ComponentwiseLiftLayer& x) const { return {x.map.input, true}; }
    LayerType operator()(const BundleConvLayer& x) const { return {x.kernel.source(), true}; }
  } v;
  return std::visit(v, l);
}

LayerType layer_output(const Layer& l) {
  struct {
    LayerType operator()(const ConvLayer& x) const { return {x.kernel.target(), false}; }
    LayerType operator()(const GateLayer& x) const { return {x.functor, false}; }
    LayerType operator()(const LiftLayer& x) const { return {x.functor, true}; }
    LayerType operator()(const ComponentwiseLiftLayer& x) const { return {x.map.output, true}; }
    LayerType operator()(const BundleConvLayer& x) const { return {x.kernel.target(), false}; }
  } v;
  return std::visit(v, l);
}

FunctorPtr NetworkSpec::output() const {
  return layers.empty() ? input : layer_output(layers.back()).functor;
}

bool NetworkSpec::output_is_bundle() const {
  return !layers.empty() && layer_output(layers.back()).bundle;
}

void NetworkSpec::typecheck() const {
  if (!input) throw Error(ErrorKind::malformed_input, "layers", "network has no input functor");
  LayerType cur{input, false};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto in = layer_input(layers[i]);
    if (in.bundle != cur.bundle || !same_functor(in.functor, cur.functor))
      throw Error(ErrorKind::type_mismatch, "layers",
                  "layer " + std::to_string(i) + " (" + layer_name(layers[i]) +
                      ") does not accept the previous layer's output",
                  nlohmann::json{{"layer", i}, {"expects_bundle", in.bundle}, {"got_bundle", cur.bundle}});
    cur = layer_output(layers[i]);
  }
}

Value apply_layer(const Layer& l, const Value& v) {
  const bool bundle_in = std::holds_alternative<BundleField>(v);
  if (bundle_in != layer_input(l).bundle)
    throw Error(ErrorKind::type_mismatch, "layers", layer_name(l) + " received the wrong kind of value");
  if (const auto* x = std::get_if<ConvLayer>(&l)) return conv_forward(x->kernel, std::get<Section>(v));
  if (const auto* x = std::get_if<GateLayer>(&l)) return gate_forward(x->alpha, x->blocks, std::get<Section>(v));
  if (const auto* x = std::get_if<LiftLayer>(&l)) {
    const auto& s = std::get<Section>(v);
    BundleField out{x->functor, ObjectMap<std::optional<BundleSection>>(x->functor->category().object_count())};
    for (auto a : x->functor->category().objects())
      if (s.has(a)) out.data[a] = bundle_lift(x->functor, s, a);
    return out;
  }
  if (const auto* x = std::get_if<ComponentwiseLiftLayer>(&l)) {
    const auto& h = std::get<BundleField>(v);
    BundleField out{x->map.output, ObjectMap<std::optional<BundleSection>>(h.data.size())};
    for (auto a : x->map.input->category().objects())
      if (h.has(a)) out.data[a] = componentwise_lift(x->map, h.at(a));
    return out;
  }
  const auto& x = std::get<BundleConvLayer>(l);
  return bundle_conv_forward(x.kernel, std::get<BundleField>(v));
}

Value network_forward_value(const NetworkSpec& net, const Value& x) {
  Value cur = x;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    try {
      cur = apply_layer(net.layers[i], cur);
    } catch (const Error& e) {
      nlohmann::json w{{"layer", i}, {"layer_type", layer_name(net.layers[i])}, {"cause", e.witness()}};
      throw Error(e.kind(), e.module(), "layer " + std::to_string(i) + ": " + e.what(), std::move(w));
    }
  }
  return cur;
}

Section network_forward(const NetworkSpec& net, const Section& x) {
  Value out = network_forward_value(net, Value{x});
  if (!std::holds_alternative<Section>(out))
    throw Error(ErrorKind::type_mismatch, "layers", "network ends in an arrow bundle, not a section");
  return std::get<Section>(std::move(out));
}

Matrix network_forward(const NetworkSpec& net, ObjectIndex a, const Matrix& x_a) {
  Section x(net.input);
  x.set(a, x_a);
  return network_forward(net, x).at(a);
}

}  // namespace cenn
