/* tslint:disable */
/* eslint-disable */

/**
 * Sup-norm history of a perturbation and its power-law fit.
 */
export class DecayCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Fitted `k` in `norm ~ (1 + t)^(-k)` after a 20% burn-in.
     */
    readonly exponent: number;
    readonly sup_norms: Float64Array;
    readonly times: Float64Array;
}

/**
 * Stationary profile samples.
 */
export class Profile {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly omega: Float64Array;
    readonly regime: string;
    readonly rho: Float64Array;
    readonly u: Float64Array;
    readonly x: Float64Array;
}

/**
 * One-paragraph summary of the regime and derived constants.
 */
export function classify(mach: number, chi0: number, gamma: number, omega_b: number): string;

/**
 * Adds a bump of height `amplitude` to all three fields and marches to `t_end`.
 */
export function decay_run(mach: number, chi0: number, gamma: number, omega_b: number, amplitude: number, t_end: number, cells: number): DecayCurve;

export function stationary_profile(mach: number, chi0: number, gamma: number, omega_b: number, cells: number): Profile;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_decaycurve_free: (a: number, b: number) => void;
    readonly __wbg_profile_free: (a: number, b: number) => void;
    readonly classify: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly decay_run: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly decaycurve_exponent: (a: number) => number;
    readonly decaycurve_sup_norms: (a: number) => [number, number];
    readonly decaycurve_times: (a: number) => [number, number];
    readonly profile_omega: (a: number) => [number, number];
    readonly profile_regime: (a: number) => [number, number];
    readonly profile_rho: (a: number) => [number, number];
    readonly profile_u: (a: number) => [number, number];
    readonly profile_x: (a: number) => [number, number];
    readonly stationary_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
