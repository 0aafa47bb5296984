/* tslint:disable */
/* eslint-disable */

export class ReconstructionComparison {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `method` is `pidsr` or `bilinear`; `view` is `error` or `aop`.
     */
    rgba(method: string, view: string): Uint8Array;
    readonly bilinearMaeDeg: number;
    readonly pidsrMaeDeg: number;
    readonly size: number;
}

/**
 * Demosaics one simulated raw with the joint pipeline and with bilinear
 * interpolation and scores both AoP maps against the truth.
 */
export function compareReconstruction(kind: string, seed: number, size: number, noise: number): ReconstructionComparison;

export function errorVsResolution(kind: string, seed: number): Float64Array;

/**
 * RGBA bytes of a scene's S0 (color), DoP or AoP (green channel).
 */
export function renderScene(kind: string, seed: number, size: number, quantity: string): Uint8Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_reconstructioncomparison_free: (a: number, b: number) => void;
    readonly compareReconstruction: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly errorVsResolution: (a: number, b: number, c: number) => [number, number, number, number];
    readonly reconstructioncomparison_bilinearMaeDeg: (a: number) => number;
    readonly reconstructioncomparison_pidsrMaeDeg: (a: number) => number;
    readonly reconstructioncomparison_rgba: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly reconstructioncomparison_size: (a: number) => number;
    readonly renderScene: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
