/* tslint:disable */
/* eslint-disable */

/**
 * Evaluate `formula` at the designated state. Returns `true` or `false`.
 */
export function check(model_json: string, formula: string): boolean;

/**
 * Draw a model as SVG.
 */
export function draw(model_json: string): string;

export function example_model(): string;

/**
 * Run a riddle scenario. Returns the run report with an SVG per state.
 */
export function riddle(scenario_json: string, mode: string): string;

/**
 * Apply an announcement. Returns `{executed, model, svg}` as JSON.
 */
export function update(model_json: string, announcement: string): string;

/**
 * Bounded validity check. Returns `{valid, countermodel?, svg?}` as JSON.
 */
export function validity(formula: string, _class: string, states: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly check: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly draw: (a: number, b: number) => [number, number, number, number];
    readonly example_model: () => [number, number];
    readonly riddle: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly update: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly validity: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
