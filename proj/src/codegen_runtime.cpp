#include "cogent/codegen.hpp"

namespace cogent {

namespace {

const char* kRuntime = R"RT(#ifndef COGENT_RUNTIME_H
#define COGENT_RUNTIME_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

typedef struct {
  unsigned char unused;
} cg_unit;

static const cg_unit cg_unit_v = {0};

/* Live heap objects; defined in the generated program. */
extern uint64_t cg_live;

static void cg_fatal(const char* msg) {
  fprintf(stderr, "cogent runtime: %s\n", msg);
  abort();
}

static void cg_unreachable(void) { cg_fatal("unreachable tag"); }

/* A runtime error both semantics agree on, reported as the program's result. */
static void cg_raise(const char* code) {
  printf("{\"error\":\"%s\"}\n", code);
  fflush(stdout);
  exit(0);
}

static void* cg_alloc(size_t n) {
  void* p = calloc(1, n);
  if (!p) cg_fatal("out of memory");
  ++cg_live;
  return p;
}

static void cg_free(void* p) {
  if (!p) cg_fatal("free of null");
  free(p);
  --cg_live;
}

static uint64_t cg_shl(uint64_t a, uint64_t b, unsigned bits) {
  if (b >= bits) return 0;
  a <<= b;
  return bits == 64 ? a : a & ((UINT64_C(1) << bits) - 1);
}

static uint64_t cg_shr(uint64_t a, uint64_t b, unsigned bits) { return b >= bits ? 0 : a >> b; }

typedef struct {
  uint32_t len;
  uint64_t* data;
} cg_wordarray;

#define CG_WORDARRAY_MAX 65536u

static cg_wordarray* cg_wa_create(uint32_t n) {
  cg_wordarray* a;
  if (n > CG_WORDARRAY_MAX) return NULL;
  a = (cg_wordarray*)cg_alloc(sizeof *a);
  a->len = n;
  a->data = (uint64_t*)calloc(n ? n : 1, sizeof(uint64_t));
  if (!a->data) cg_fatal("out of memory");
  return a;
}

static void cg_wa_free(cg_wordarray* a) {
  free(a->data);
  cg_free(a);
}

#ifdef CG_DRIVER

/* Just enough JSON to read argument values. */
typedef enum { CG_J_NULL, CG_J_BOOL, CG_J_NUM, CG_J_STR, CG_J_ARR, CG_J_OBJ } cg_jkind;

typedef struct cg_json {
  cg_jkind kind;
  uint64_t num;
  char* str;
  size_t n;
  struct cg_json* items;
  char** keys;
} cg_json;

typedef struct {
  const char* s;
  size_t i;
} cg_jparser;

static void cg_jws(cg_jparser* p) {
  while (p->s[p->i] == ' ' || p->s[p->i] == '\n' || p->s[p->i] == '\t' || p->s[p->i] == '\r') ++p->i;
}

static char* cg_jstring(cg_jparser* p) {
  size_t cap = 16, len = 0;
  char* out = (char*)malloc(cap);
  if (!out) cg_fatal("out of memory");
  if (p->s[p->i] != '"') cg_fatal("json: expected string");
  ++p->i;
  while (p->s[p->i] != '"') {
    char c = p->s[p->i++];
    if (c == '\0') cg_fatal("json: unterminated string");
    if (c == '\\') {
      c = p->s[p->i++];
      if (c == 'n') c = '\n';
      else if (c == 't') c = '\t';
      else if (c != '"' && c != '\\' && c != '/') cg_fatal("json: unsupported escape");
    }
    if (len + 1 >= cap) {
      cap *= 2;
      out = (char*)realloc(out, cap);
      if (!out) cg_fatal("out of memory");
    }
    out[len++] = c;
  }
  ++p->i;
  out[len] = '\0';
  return out;
}

static void cg_jvalue(cg_jparser* p, cg_json* out);

static void cg_jpush(cg_json* out, size_t* cap) {
  if (out->n == *cap) {
    *cap = *cap ? *cap * 2 : 4;
    out->items = (cg_json*)realloc(out->items, *cap * sizeof(cg_json));
    out->keys = (char**)realloc(out->keys, *cap * sizeof(char*));
    if (!out->items || !out->keys) cg_fatal("out of memory");
  }
}

static void cg_jvalue(cg_jparser* p, cg_json* out) {
  size_t cap = 0;
  memset(out, 0, sizeof *out);
  cg_jws(p);
  switch (p->s[p->i]) {
    case '{':
      out->kind = CG_J_OBJ;
      ++p->i;
      cg_jws(p);
      if (p->s[p->i] == '}') {
        ++p->i;
        return;
      }
      for (;;) {
        cg_jpush(out, &cap);
        cg_jws(p);
        out->keys[out->n] = cg_jstring(p);
        cg_jws(p);
        if (p->s[p->i++] != ':') cg_fatal("json: expected ':'");
        cg_jvalue(p, &out->items[out->n]);
        ++out->n;
        cg_jws(p);
        if (p->s[p->i] == ',') {
          ++p->i;
          continue;
        }
        if (p->s[p->i++] != '}') cg_fatal("json: expected '}'");
        return;
      }
    case '[':
      out->kind = CG_J_ARR;
      ++p->i;
      cg_jws(p);
      if (p->s[p->i] == ']') {
        ++p->i;
        return;
      }
      for (;;) {
        cg_jpush(out, &cap);
        out->keys[out->n] = NULL;
        cg_jvalue(p, &out->items[out->n]);
        ++out->n;
        cg_jws(p);
        if (p->s[p->i] == ',') {
          ++p->i;
          continue;
        }
        if (p->s[p->i++] != ']') cg_fatal("json: expected ']'");
        return;
      }
    case '"':
      out->kind = CG_J_STR;
      out->str = cg_jstring(p);
      return;
    case 'n':
      if (strncmp(p->s + p->i, "null", 4) != 0) cg_fatal("json: bad literal");
      p->i += 4;
      out->kind = CG_J_NULL;
      return;
    case 't':
    case 'f':
      out->kind = CG_J_BOOL;
      out->num = p->s[p->i] == 't';
      p->i += out->num ? 4 : 5;
      return;
    default: {
      char* end;
      if (p->s[p->i] < '0' || p->s[p->i] > '9') cg_fatal("json: unexpected character");
      out->kind = CG_J_NUM;
      out->num = strtoull(p->s + p->i, &end, 10);
      p->i = (size_t)(end - p->s);
      return;
    }
  }
}

static cg_json* cg_json_load(const char* path) {
  FILE* f = fopen(path, "rb");
  long size;
  char* text;
  cg_jparser p;
  cg_json* out;
  if (!f) cg_fatal("cannot open input");
  fseek(f, 0, SEEK_END);
  size = ftell(f);
  fseek(f, 0, SEEK_SET);
  text = (char*)malloc((size_t)size + 1);
  if (!text || fread(text, 1, (size_t)size, f) != (size_t)size) cg_fatal("cannot read input");
  text[size] = '\0';
  fclose(f);
  out = (cg_json*)malloc(sizeof *out);
  if (!out) cg_fatal("out of memory");
  p.s = text;
  p.i = 0;
  cg_jvalue(&p, out);
  return out;
}

static const cg_json* cg_jget(const cg_json* j, const char* key) {
  size_t i;
  if (j->kind != CG_J_OBJ) return NULL;
  for (i = 0; i < j->n; ++i)
    if (strcmp(j->keys[i], key) == 0) return &j->items[i];
  return NULL;
}

static const cg_json* cg_jneed(const cg_json* j, const char* key) {
  const cg_json* v = cg_jget(j, key);
  if (!v) {
    fprintf(stderr, "cogent runtime: missing key '%s'\n", key);
    abort();
  }
  return v;
}

static uint64_t cg_read_lit(const cg_json* j, const char* ty) {
  const cg_json* v = cg_jneed(j, "lit");
  if (strcmp(cg_jneed(j, "ty")->str, ty) != 0) cg_fatal("literal of the wrong type");
  return v->num;
}

static const cg_json* cg_read_con(const cg_json* j, const char** ctor) {
  const cg_json* c = cg_jneed(j, "con");
  if (c->kind != CG_J_ARR || c->n != 2) cg_fatal("malformed constructor");
  *ctor = c->items[0].str;
  return &c->items[1];
}

static const char* cg_read_fun(const cg_json* j) {
  const cg_json* f = cg_jget(j, "fun");
  if (!f) f = cg_jneed(j, "absfun");
  return f->str;
}

static cg_wordarray* cg_wa_read(const cg_json* j, const char* ty) {
  const cg_json* items = cg_jneed(j, "items");
  cg_wordarray* a = cg_wa_create((uint32_t)items->n);
  size_t i;
  if (!a) cg_fatal("array too long");
  for (i = 0; i < items->n; ++i) a->data[i] = cg_read_lit(&items->items[i], ty);
  return a;
}

static void cg_print_lit(uint64_t v, const char* ty) {
  printf("{\"lit\":%llu,\"ty\":\"%s\"}", (unsigned long long)v, ty);
}

typedef void (*cg_content_printer)(const void*);

static const void** cg_heap_ptrs;
static cg_content_printer* cg_heap_printers;
static size_t cg_heap_n, cg_heap_cap;

/* Prints {"ptr":k}, numbering pointers in the order they are first seen. */
static void cg_heap_ref(const void* p, cg_content_printer pc) {
  size_t i;
  for (i = 0; i < cg_heap_n; ++i)
    if (cg_heap_ptrs[i] == p) break;
  if (i == cg_heap_n) {
    if (cg_heap_n == cg_heap_cap) {
      cg_heap_cap = cg_heap_cap ? cg_heap_cap * 2 : 16;
      cg_heap_ptrs = (const void**)realloc((void*)cg_heap_ptrs, cg_heap_cap * sizeof *cg_heap_ptrs);
      cg_heap_printers = (cg_content_printer*)realloc((void*)cg_heap_printers, cg_heap_cap * sizeof *cg_heap_printers);
      if (!cg_heap_ptrs || !cg_heap_printers) cg_fatal("out of memory");
    }
    cg_heap_ptrs[cg_heap_n] = p;
    cg_heap_printers[cg_heap_n] = pc;
    ++cg_heap_n;
  }
  printf("{\"ptr\":%llu}", (unsigned long long)(i + 1));
}

static void cg_heap_flush(void) {
  size_t i;
  for (i = 0; i < cg_heap_n; ++i) {
    if (i) putchar(',');
    cg_heap_printers[i](cg_heap_ptrs[i]);
  }
}

static void cg_wa_print(const cg_wordarray* a, const char* ty) {
  uint32_t i;
  fputs("{\"abs\":\"WordArray\",\"items\":[", stdout);
  for (i = 0; i < a->len; ++i) {
    if (i) putchar(',');
    cg_print_lit(a->data[i], ty);
  }
  fputs("]}", stdout);
}

#endif /* CG_DRIVER */

#endif /* COGENT_RUNTIME_H */
)RT";

}  // namespace

const std::string& c_runtime_header() {
  static const std::string s = kRuntime;
  return s;
}

}  // namespace cogent
