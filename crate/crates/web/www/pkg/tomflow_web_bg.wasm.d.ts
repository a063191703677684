/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_get_curve_x: (a: number) => [number, number];
export const __wbg_get_curve_y: (a: number) => [number, number];
export const __wbg_get_profile_h: (a: number) => [number, number];
export const __wbg_get_profile_lambda1: (a: number) => [number, number];
export const __wbg_get_profile_region: (a: number) => [number, number];
export const __wbg_get_profile_rho: (a: number) => [number, number];
export const __wbg_get_profile_summary: (a: number) => [number, number];
export const __wbg_get_profile_v: (a: number) => [number, number];
export const __wbg_get_profile_x: (a: number) => [number, number];
export const __wbg_get_setup_h_exp: (a: number) => number;
export const __wbg_get_setup_heq_exp: (a: number) => number;
export const __wbg_get_setup_q_exp: (a: number) => number;
export const __wbg_get_setup_rho_left: (a: number) => number;
export const __wbg_get_setup_rho_right: (a: number) => number;
export const __wbg_get_setup_v_left: (a: number) => number;
export const __wbg_get_setup_v_right: (a: number) => number;
export const __wbg_get_stability_gamma: (a: number) => [number, number];
export const __wbg_get_stability_lam1_arz: (a: number) => [number, number];
export const __wbg_get_stability_lam1_frozen: (a: number) => [number, number];
export const __wbg_get_stability_mu: (a: number) => [number, number];
export const __wbg_get_stability_rho: (a: number) => [number, number];
export const __wbg_profile_free: (a: number, b: number) => void;
export const __wbg_set_curve_x: (a: number, b: number, c: number) => void;
export const __wbg_set_curve_y: (a: number, b: number, c: number) => void;
export const __wbg_set_profile_h: (a: number, b: number, c: number) => void;
export const __wbg_set_profile_lambda1: (a: number, b: number, c: number) => void;
export const __wbg_set_profile_region: (a: number, b: number, c: number) => void;
export const __wbg_set_profile_rho: (a: number, b: number, c: number) => void;
export const __wbg_set_profile_summary: (a: number, b: number, c: number) => void;
export const __wbg_set_profile_v: (a: number, b: number, c: number) => void;
export const __wbg_set_profile_x: (a: number, b: number, c: number) => void;
export const __wbg_set_setup_h_exp: (a: number, b: number) => void;
export const __wbg_set_setup_heq_exp: (a: number, b: number) => void;
export const __wbg_set_setup_q_exp: (a: number, b: number) => void;
export const __wbg_set_setup_rho_left: (a: number, b: number) => void;
export const __wbg_set_setup_rho_right: (a: number, b: number) => void;
export const __wbg_set_setup_v_left: (a: number, b: number) => void;
export const __wbg_set_setup_v_right: (a: number, b: number) => void;
export const __wbg_set_stability_gamma: (a: number, b: number, c: number) => void;
export const __wbg_set_stability_lam1_arz: (a: number, b: number, c: number) => void;
export const __wbg_set_stability_lam1_frozen: (a: number, b: number, c: number) => void;
export const __wbg_set_stability_mu: (a: number, b: number, c: number) => void;
export const __wbg_set_stability_rho: (a: number, b: number, c: number) => void;
export const __wbg_setup_free: (a: number, b: number) => void;
export const __wbg_stability_free: (a: number, b: number) => void;
export const delta_v_curve: (a: number, b: number, c: number) => [number, number, number];
export const riemann_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const setup_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => number;
export const stability_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
