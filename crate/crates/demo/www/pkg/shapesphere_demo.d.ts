/* tslint:disable */
/* eslint-disable */

/**
 * Marked points and angles of the shape sphere.
 */
export function atlas_json(m1: number, m2: number, m3: number): string;

/**
 * The pinch motion from the maximal-area shape to a binary collision,
 * with its reconstructed rotation.
 */
export function pinch_json(m1: number, m2: number, m3: number, samples: number): string;

/**
 * A seeded random smooth motion with its reconstructed rotation.
 */
export function random_motion_json(seed: number, m1: number, m2: number, m3: number, amplitude: number, samples: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly atlas_json: (a: number, b: number, c: number) => [number, number];
    readonly pinch_json: (a: number, b: number, c: number, d: number) => [number, number];
    readonly random_motion_json: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
