/* tslint:disable */
/* eslint-disable */

/**
 * `Δv` at `n` points across the fan, paired with the sample positions.
 */
export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    x: Float64Array;
    y: Float64Array;
}

/**
 * Sampled solution; `region` codes are 0 left, 1 fan, 2 middle, 3 right.
 */
export class Profile {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    h: Float64Array;
    lambda1: Float64Array;
    region: Float64Array;
    rho: Float64Array;
    summary: string;
    v: Float64Array;
    x: Float64Array;
}

/**
 * Riemann data with `h` taken from the equilibrium `H(ρ)` on both sides.
 */
export class Setup {
    free(): void;
    [Symbol.dispose](): void;
    constructor(q_exp: number, h_exp: number, heq_exp: number, rho_left: number, v_left: number, rho_right: number, v_right: number);
    h_exp: number;
    heq_exp: number;
    q_exp: number;
    rho_left: number;
    rho_right: number;
    v_left: number;
    v_right: number;
}

/**
 * Stability coefficients on a density grid for the velocity `v`.
 */
export class Stability {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    gamma: Float64Array;
    lam1_arz: Float64Array;
    lam1_frozen: Float64Array;
    mu: Float64Array;
    rho: Float64Array;
}

export function delta_v_curve(s: Setup, t: number, n: number): Curve;

export function riemann_profile(s: Setup, t: number, x_min: number, x_max: number, n: number): Profile;

export function stability_curve(q_exp: number, h_exp: number, heq_exp: number, v: number, rho_min: number, rho_max: number, n: number): Stability;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_get_curve_x: (a: number) => [number, number];
    readonly __wbg_get_curve_y: (a: number) => [number, number];
    readonly __wbg_get_profile_h: (a: number) => [number, number];
    readonly __wbg_get_profile_lambda1: (a: number) => [number, number];
    readonly __wbg_get_profile_region: (a: number) => [number, number];
    readonly __wbg_get_profile_rho: (a: number) => [number, number];
    readonly __wbg_get_profile_summary: (a: number) => [number, number];
    readonly __wbg_get_profile_v: (a: number) => [number, number];
    readonly __wbg_get_profile_x: (a: number) => [number, number];
    readonly __wbg_get_setup_h_exp: (a: number) => number;
    readonly __wbg_get_setup_heq_exp: (a: number) => number;
    readonly __wbg_get_setup_q_exp: (a: number) => number;
    readonly __wbg_get_setup_rho_left: (a: number) => number;
    readonly __wbg_get_setup_rho_right: (a: number) => number;
    readonly __wbg_get_setup_v_left: (a: number) => number;
    readonly __wbg_get_setup_v_right: (a: number) => number;
    readonly __wbg_get_stability_gamma: (a: number) => [number, number];
    readonly __wbg_get_stability_lam1_arz: (a: number) => [number, number];
    readonly __wbg_get_stability_lam1_frozen: (a: number) => [number, number];
    readonly __wbg_get_stability_mu: (a: number) => [number, number];
    readonly __wbg_get_stability_rho: (a: number) => [number, number];
    readonly __wbg_profile_free: (a: number, b: number) => void;
    readonly __wbg_set_curve_x: (a: number, b: number, c: number) => void;
    readonly __wbg_set_curve_y: (a: number, b: number, c: number) => void;
    readonly __wbg_set_profile_h: (a: number, b: number, c: number) => void;
    readonly __wbg_set_profile_lambda1: (a: number, b: number, c: number) => void;
    readonly __wbg_set_profile_region: (a: number, b: number, c: number) => void;
    readonly __wbg_set_profile_rho: (a: number, b: number, c: number) => void;
    readonly __wbg_set_profile_summary: (a: number, b: number, c: number) => void;
    readonly __wbg_set_profile_v: (a: number, b: number, c: number) => void;
    readonly __wbg_set_profile_x: (a: number, b: number, c: number) => void;
    readonly __wbg_set_setup_h_exp: (a: number, b: number) => void;
    readonly __wbg_set_setup_heq_exp: (a: number, b: number) => void;
    readonly __wbg_set_setup_q_exp: (a: number, b: number) => void;
    readonly __wbg_set_setup_rho_left: (a: number, b: number) => void;
    readonly __wbg_set_setup_rho_right: (a: number, b: number) => void;
    readonly __wbg_set_setup_v_left: (a: number, b: number) => void;
    readonly __wbg_set_setup_v_right: (a: number, b: number) => void;
    readonly __wbg_set_stability_gamma: (a: number, b: number, c: number) => void;
    readonly __wbg_set_stability_lam1_arz: (a: number, b: number, c: number) => void;
    readonly __wbg_set_stability_lam1_frozen: (a: number, b: number, c: number) => void;
    readonly __wbg_set_stability_mu: (a: number, b: number, c: number) => void;
    readonly __wbg_set_stability_rho: (a: number, b: number, c: number) => void;
    readonly __wbg_setup_free: (a: number, b: number) => void;
    readonly __wbg_stability_free: (a: number, b: number) => void;
    readonly delta_v_curve: (a: number, b: number, c: number) => [number, number, number];
    readonly riemann_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly setup_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => number;
    readonly stability_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
