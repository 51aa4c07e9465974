//! Convention notes embedded in every report.

use crate::report::LedgerNote;

pub fn notes() -> Vec<LedgerNote> {
    vec![
        LedgerNote {
            id: "metric-normalization",
            text: "g = (1/2) d eta(Phi., .) + eta (x) eta. With this choice the standard structures have scalar curvature -2n, Phi-sectional curvature -3 and are null eta-Einstein (Ric = -2g + (2n+2) eta (x) eta).",
        },
        LedgerNote {
            id: "deformation",
            text: "xi_a = xi + sum a_i X_ii with X_ii = 2 x_i d/dy_i - 2 y_i d/dx_i + (x_i^2 - y_i^2) d/dz in the right model, eta_a = eta / (1 + sum a_i r_i^2), moment components h_i = r_i^2 / (1 + sum a_j r_j^2). The Reeb flow turns block i at rate 2 a_i.",
        },
        LedgerNote {
            id: "scalar-constants",
            text: "Calibrated closed form s = 16(n+1)|a| - 2n - 8(n+1)(n+2) sum a_i^2 h_i (exact to rounding under the conventions above). The reference closed form 2n(4|a|-1) - n(2n+7) sum a_i^2 h_i agrees only at a = 0. For n = 1, a = (1) the calibrated affine coefficients are (30, -48); the expected (2, -4) is not reproduced and the curvature report fails that check.",
        },
        LedgerNote {
            id: "transverse-metric",
            text: "Sub-Riemannian lengths use g_T = sum dx_i^2 + dy_i^2 on ker eta, twice the restriction of g. Then d_cc(0,(1,0,0)) = 1 and d_cc(0,(0,0,1)) = 2 sqrt(pi). The penalized metric is g_L = g_T + L eta (x) eta.",
        },
        LedgerNote {
            id: "lattice-embedding",
            text: "Uniform lattice k: generators (k e_i, 0, 0), (0, k e_i, 0), (0, 0, k). Graded lattice l: generators (e_i, 0, 0), (0, l_i e_i, 0), (0, 0, 1) with l_i | l_{i+1}.",
        },
        LedgerNote {
            id: "graded-torsion",
            text: "For graded lattices the torsion of H_1 is Z_{l_1}; this is computed from the relation matrix, not quoted.",
        },
        LedgerNote {
            id: "provenance",
            text: "literature = published constant or closed form; identity = definition, normalization or input validation; computed = independent computation in this tool (graph search, shooting, Smith normal form, calibration).",
        },
    ]
}
