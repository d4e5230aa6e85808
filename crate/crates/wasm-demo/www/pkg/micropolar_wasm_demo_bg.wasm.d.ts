/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_decaycurve_free: (a: number, b: number) => void;
export const __wbg_profile_free: (a: number, b: number) => void;
export const classify: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const decay_run: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const decaycurve_exponent: (a: number) => number;
export const decaycurve_sup_norms: (a: number) => [number, number];
export const decaycurve_times: (a: number) => [number, number];
export const profile_omega: (a: number) => [number, number];
export const profile_regime: (a: number) => [number, number];
export const profile_rho: (a: number) => [number, number];
export const profile_u: (a: number) => [number, number];
export const profile_x: (a: number) => [number, number];
export const stationary_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
