// Trains a Mexican Hat kernel ELM on one Iris split and prints test accuracy.
#include <cstdio>

#include "mhkelm/mhkelm.hpp"

int main() {
    using namespace mhkelm;
    const Registry reg = load_registry(default_registry_path());
    const Dataset iris = reg.load("iris");
    const auto [train, test] = random_split(iris, reg.at("iris").plan(7));

    std::vector<int> classes(static_cast<std::size_t>(iris.category_count()));
    for (std::size_t i = 0; i < classes.size(); ++i) classes[i] = static_cast<int>(i);

    const KelmModel model = train_kelm_indexed(train.features, train.labels, classes, KernelSpec::mexican_hat(1.0), 64.0);
    const auto pred = classify_multiclass(model, test.features);
    std::printf("%s: %zu train / %zu test rows, accuracy %.2f%%, solve residual %.2e\n", model.spec.describe().c_str(),
                static_cast<std::size_t>(train.size()), pred.size(), 100.0 * accuracy_of(pred, test.labels),
                model.solve_residual);

    const auto fourier = verify_admissibility(KernelSpec::mexican_hat(1.0), omega_grid(8.0, 200));
    std::printf("Fourier check: %s, min %.3e\n", verdict_name(fourier.verdict), fourier.min_numeric_ft);
}
