#ifndef MUSEGEN_H
#define MUSEGEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MusegenStatus {
  MUSEGEN_STATUS_OK = 0,
  MUSEGEN_STATUS_NULL_ARGUMENT = 1,
  MUSEGEN_STATUS_INVALID_UTF8 = 2,
  MUSEGEN_STATUS_INVALID_REQUEST = 3,
  MUSEGEN_STATUS_CATALOG_ERROR = 4,
  MUSEGEN_STATUS_GENERATION_FAILED = 5,
  MUSEGEN_STATUS_LAYOUT_ERROR = 6,
  MUSEGEN_STATUS_OUT_OF_RANGE = 7,
  MUSEGEN_STATUS_PANIC = 8,
} MusegenStatus;

/*
 An immutable artifact catalog.
 */
typedef struct MusegenCatalog MusegenCatalog;

/*
 A generated or imported tile scene.
 */
typedef struct MusegenScene MusegenScene;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Static version string of the engine.
 */
const char *musegen_version(void);

/*
 Stable error code of the last failed call on this thread, such as
 `"InfeasibleParams"`, or null after a success. Valid until the next call.
 */
const char *musegen_last_error_code(void);

/*
 Human-readable message for the last failed call on this thread.
 */
const char *musegen_last_error_message(void);

/*
 # Safety
 `s` must come from this library or be null.
 */
void musegen_string_free(char *s);

/*
 Builds a catalog from a metadata document and an asset manifest.
 `metadata_name` selects the format by extension (`.csv`, `.json`).

 # Safety
 String arguments must be null or nul-terminated; `out` must be writable.
 */
enum MusegenStatus musegen_catalog_parse(const char *metadata_name,
                                         const char *metadata,
                                         const char *manifest,
                                         struct MusegenCatalog **out_catalog);

/*
 # Safety
 `catalog` must be a live handle; `out_json` must be writable.
 */
enum MusegenStatus musegen_catalog_to_json(const struct MusegenCatalog *catalog, char **out_json);

/*
 Number of records, or 0 for a null handle.

 # Safety
 `catalog` must be a live handle or null.
 */
size_t musegen_catalog_len(const struct MusegenCatalog *catalog);

/*
 # Safety
 `catalog` must come from this library or be null.
 */
void musegen_catalog_free(struct MusegenCatalog *catalog);

/*
 Room sizing report as JSON for `key` (`artist`, `style`, `location`, `time`).

 # Safety
 `catalog` must be a live handle; `key` nul-terminated; `out_json` writable.
 */
enum MusegenStatus musegen_plan(const struct MusegenCatalog *catalog,
                                const char *key,
                                char **out_json);

/*
 Region growth on a bundled footprint. `catalog` may be null unless the
 request uses catalog-driven seeds.

 # Safety
 `catalog` must be a live handle or null; `request_json` nul-terminated;
 `out_scene` writable.
 */
enum MusegenStatus musegen_generate_growth(const struct MusegenCatalog *catalog,
                                           const char *request_json,
                                           struct MusegenScene **out_scene);

/*
 Seeded binary space partitioning.

 # Safety
 As for [`musegen_generate_growth`].
 */
enum MusegenStatus musegen_generate_bsp(const struct MusegenCatalog *catalog,
                                        const char *request_json,
                                        struct MusegenScene **out_scene);

/*
 A single rectangular room.

 # Safety
 As for [`musegen_generate_growth`].
 */
enum MusegenStatus musegen_generate_room(const struct MusegenCatalog *catalog,
                                         const char *request_json,
                                         struct MusegenScene **out_scene);

/*
 # Safety
 `layout_json` nul-terminated; `out_scene` writable.
 */
enum MusegenStatus musegen_scene_import(const char *layout_json, struct MusegenScene **out_scene);

/*
 Canonical layout JSON.

 # Safety
 `scene` must be a live handle; `out_json` writable.
 */
enum MusegenStatus musegen_scene_export_layout(const struct MusegenScene *scene, char **out_json);

/*
 Wavefront OBJ text.

 # Safety
 `scene` must be a live handle; `out_obj` writable.
 */
enum MusegenStatus musegen_scene_export_obj(const struct MusegenScene *scene, char **out_obj);

/*
 Number of placed objects, or 0 for a null handle.

 # Safety
 `scene` must be a live handle or null.
 */
size_t musegen_scene_object_count(const struct MusegenScene *scene);

/*
 # Safety
 `scene` must come from this library or be null.
 */
void musegen_scene_free(struct MusegenScene *scene);

/*
 Light colour for a colour temperature in kelvin; writes r, g, b.

 # Safety
 `out_rgb` must point to three writable bytes.
 */
enum MusegenStatus musegen_kelvin_to_rgb(double temperature_k, uint8_t *out_rgb);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUSEGEN_H */
