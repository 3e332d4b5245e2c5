use super::Reporter;

const BACKGROUNDS: &[(&str, &str, &str)] = &[
    ("zero", "Ψ ≡ 0", "variant = \"zero\""),
    (
        "mkdv-kink",
        "±√c tanh(√(c/2)(x + ct)), exact for f = -x³",
        "variant = \"mkdv-kink\"\nc = 1.0\nsign = \"plus\"",
    ),
    (
        "gardner-kink",
        "1/(3β) ± √(c/β) tanh(√(c/2)(x + (c - 1/(3β))t)), exact for f = x² - βx³",
        "variant = \"gardner-kink\"\nc = 1.0\nbeta = 0.5\nsign = \"plus\"",
    ),
    (
        "kdv-cnoidal",
        "α + β cn²(γ(x - ct), κ), parameters resolved against f",
        "variant = \"kdv-cnoidal\"\nc = 1.0\nkappa = 0.5",
    ),
    (
        "mkdv-dnoidal",
        "β dn(γ(x - ct), κ), focusing cubic f only",
        "variant = \"mkdv-dnoidal\"\nc = 1.0\nkappa = 0.5",
    ),
    (
        "synthetic",
        "1 + 4 tanh(x + t) + cos(log(1 + x² + t²)), not a solution",
        "variant = \"synthetic\"",
    ),
    (
        "tabulated",
        "static profile read from a two-column text file, spline-interpolated",
        "variant = \"tabulated\"\npath = \"profile.txt\"",
    ),
];

const NONLINEARITIES: &[(&str, &str, &str)] = &[
    (
        "polynomial",
        "Σ a_k x^k, coefficients lowest order first",
        "kind = \"polynomial\"\ncoefficients = [0.0, 0.0, 1.0]",
    ),
    (
        "exponential",
        "e^x truncated at `order` terms",
        "kind = \"exponential\"\norder = 30",
    ),
    ("sine", "sin x truncated at `order` terms", "kind = \"sine\""),
    ("cosine", "cos x truncated at `order` terms", "kind = \"cosine\""),
    (
        "custom-series",
        "Σ a_k x^k treated as a transcendental series",
        "kind = \"custom-series\"\ncoefficients = [0.0, 0.5, 0.25]",
    ),
];

pub fn catalog(out: Reporter) {
    out.line("# backgrounds ([background] section)");
    for (name, formula, snippet) in BACKGROUNDS {
        out.line(format!("\n{name}: {formula}\n{snippet}"));
    }
    out.line("\n# nonlinearities ([nonlinearity] section)");
    for (name, formula, snippet) in NONLINEARITIES {
        out.line(format!("\n{name}: {formula}\n{snippet}"));
    }
}
